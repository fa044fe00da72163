#include "oprlab/harness/metrics.hpp"

#include <cstdio>
#include <sstream>

#include "oprlab/errors.hpp"

namespace oprlab::harness {
namespace {

void put(std::string& s, const char* key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    s += key;
    s += '=';
    s += buf;
    s += ' ';
}

void put(std::string& s, const char* key, std::uint64_t v) {
    s += key;
    s += '=';
    s += std::to_string(v);
    s += ' ';
}

}  // namespace

const std::vector<std::string>& MetricsRecord::field_names() {
    static const std::vector<std::string> names = {
        "update",         "env_steps",     "lr",
        "episodes",       "ep_return_mean", "ep_return_max",
        "ep_len_mean",    "entropy",       "surrogate_loss",
        "value_loss",     "entropy_term",  "bc_loss",
        "total_loss",     "clip_fraction", "grad_norm",
        "buffer_transitions", "buffer_episodes", "tau",
        "mean_abs_delta", "total_episodes"};
    return names;
}

std::string MetricsRecord::to_line() const {
    std::string s;
    s.reserve(512);
    put(s, "update", update_index);
    put(s, "env_steps", env_steps);
    put(s, "lr", lr);
    put(s, "episodes", episodes);
    put(s, "ep_return_mean", ep_return_mean);
    put(s, "ep_return_max", ep_return_max);
    put(s, "ep_len_mean", ep_len_mean);
    put(s, "entropy", entropy);
    put(s, "surrogate_loss", surrogate_loss);
    put(s, "value_loss", value_loss);
    put(s, "entropy_term", entropy_term);
    put(s, "bc_loss", bc_loss);
    put(s, "total_loss", total_loss);
    put(s, "clip_fraction", clip_fraction);
    put(s, "grad_norm", grad_norm);
    put(s, "buffer_transitions", buffer_transitions);
    put(s, "buffer_episodes", buffer_episodes);
    put(s, "tau", tau);
    put(s, "mean_abs_delta", mean_abs_delta);
    put(s, "total_episodes", total_episodes);
    s.pop_back();  // trailing space
    return s;
}

void MetricsWriter::open(const std::string& path) {
    path_ = path;
    out_.open(path, std::ios::out | std::ios::trunc);
    if (!out_) throw IoError("cannot open metrics file for writing: " + path);
    out_ << "# oprlab-metrics v1\n";
    out_ << "# fields:";
    for (const auto& f : MetricsRecord::field_names()) out_ << " " << f;
    out_ << "\n";
    out_.flush();
    if (!out_) throw IoError("cannot write metrics file: " + path);
}

void MetricsWriter::append(const MetricsRecord& r) {
    out_ << r.to_line() << "\n";
    out_.flush();
    if (!out_) throw IoError("failed writing metrics file: " + path_);
}

bool MetricsFile::has_field(const std::string& field) const {
    for (const auto& f : fields) {
        if (f == field) return true;
    }
    return false;
}

double MetricsFile::value(std::size_t row, const std::string& field) const {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == field) return rows[row][i];
    }
    throw DomainError("metrics: no field named " + field);
}

MetricsFile MetricsFile::read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open metrics file: " + path);
    MetricsFile mf;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            // "# fields: ..." names the columns even when no records follow.
            const std::string marker = "# fields:";
            if (line.rfind(marker, 0) == 0 && mf.fields.empty()) {
                std::stringstream hs(line.substr(marker.size()));
                std::string name;
                while (hs >> name) mf.fields.push_back(name);
            }
            continue;
        }
        std::vector<std::string> names, values;
        std::stringstream ss(line);
        std::string tok;
        while (ss >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw IoError(path + ":" + std::to_string(lineno) +
                              ": malformed token '" + tok + "'");
            }
            names.push_back(tok.substr(0, eq));
            values.push_back(tok.substr(eq + 1));
        }
        if (mf.fields.empty()) {
            mf.fields = names;
        } else if (names != mf.fields) {
            throw IoError(path + ":" + std::to_string(lineno) +
                          ": field set differs from first record");
        }
        std::vector<double> parsed;
        parsed.reserve(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            try {
                parsed.push_back(std::stod(values[i]));
            } catch (const std::exception&) {
                throw IoError(path + ":" + std::to_string(lineno) +
                              ": non-numeric value for " + names[i]);
            }
        }
        mf.raw_rows.push_back(std::move(values));
        mf.rows.push_back(std::move(parsed));
    }
    return mf;
}

}  // namespace oprlab::harness
