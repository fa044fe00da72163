#pragma once

#include <string>
#include <vector>

namespace oprlab::harness {

// Splits a metrics file into one two-column (env_steps, value) table per
// metric, written as <out_dir>/<metric>.tsv. Values are copied verbatim from
// the source file (lossless). Returns the written file paths.
std::vector<std::string> export_plot_data(const std::string& metrics_path,
                                          const std::string& out_dir);

}  // namespace oprlab::harness
