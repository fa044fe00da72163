#include "oprlab/harness/export_data.hpp"

#include <filesystem>
#include <fstream>

#include "oprlab/errors.hpp"
#include "oprlab/harness/metrics.hpp"

namespace oprlab::harness {

std::vector<std::string> export_plot_data(const std::string& metrics_path,
                                          const std::string& out_dir) {
    const MetricsFile mf = MetricsFile::read(metrics_path);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create export directory " + out_dir);

    std::size_t steps_col = mf.fields.size();
    for (std::size_t i = 0; i < mf.fields.size(); ++i) {
        if (mf.fields[i] == "env_steps") steps_col = i;
    }
    if (!mf.fields.empty() && steps_col == mf.fields.size()) {
        throw IoError("metrics file has no env_steps field: " + metrics_path);
    }

    std::vector<std::string> written;
    for (std::size_t col = 0; col < mf.fields.size(); ++col) {
        if (col == steps_col) continue;
        const std::string path = out_dir + "/" + mf.fields[col] + ".tsv";
        std::ofstream os(path);
        if (!os) throw IoError("cannot write export file: " + path);
        os << "env_steps\t" << mf.fields[col] << "\n";
        for (const auto& row : mf.raw_rows) {
            os << row[steps_col] << "\t" << row[col] << "\n";
        }
        if (!os) throw IoError("failed writing export file: " + path);
        written.push_back(path);
    }
    // An empty metrics file still produces headered tables when the field
    // set is known; with no records at all there is nothing to emit.
    return written;
}

}  // namespace oprlab::harness
