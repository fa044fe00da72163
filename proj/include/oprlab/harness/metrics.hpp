#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace oprlab::harness {

// One row of the training log. Written as a self-describing `key=value` line
// per update. wall_clock_s is reported on stdout only: the metrics file is
// part of the byte-identical determinism contract.
struct MetricsRecord {
    std::uint64_t update_index = 0;
    std::uint64_t env_steps = 0;
    double lr = 0.0;
    std::uint64_t episodes = 0;  // completed since the previous record
    double ep_return_mean = 0.0;
    double ep_return_max = 0.0;
    double ep_len_mean = 0.0;
    double entropy = 0.0;  // mean collection-time policy entropy
    double surrogate_loss = 0.0;
    double value_loss = 0.0;
    double entropy_term = 0.0;
    double bc_loss = 0.0;
    double total_loss = 0.0;
    double clip_fraction = 0.0;
    double grad_norm = 0.0;
    std::uint64_t buffer_transitions = 0;
    std::uint64_t buffer_episodes = 0;
    double tau = 0.0;
    double mean_abs_delta = 0.0;
    std::uint64_t total_episodes = 0;
    double wall_clock_s = 0.0;  // not serialized

    std::string to_line() const;
    static const std::vector<std::string>& field_names();
};

class MetricsWriter {
public:
    void open(const std::string& path);
    void append(const MetricsRecord& r);
    bool is_open() const { return out_.is_open(); }
    const std::string& path() const { return path_; }

private:
    std::ofstream out_;
    std::string path_;
};

// Parsed metrics file; values keep their original text for lossless export.
struct MetricsFile {
    std::vector<std::string> fields;                       // column order
    std::vector<std::vector<std::string>> raw_rows;        // tokens per row
    std::vector<std::vector<double>> rows;                 // parsed values

    double value(std::size_t row, const std::string& field) const;
    bool has_field(const std::string& field) const;

    static MetricsFile read(const std::string& path);
};

}  // namespace oprlab::harness
