#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lqw/config.hpp"

namespace lqw::report {

/// Shortest round-trip decimal form, 17 significant digits, '.' decimal
/// separator; the one float format used in every CSV/JSON artifact.
std::string format_double(double x);

/// CSV with a header row, comma separator, LF line endings.
class CsvWriter {
  public:
    explicit CsvWriter(const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& cells);
    void row(const std::vector<double>& cells);
    const std::string& str() const { return body_; }

  private:
    std::size_t ncols_;
    std::string body_;
};

/// FNV-1a 64-bit content checksum (hex).  Detects artifact drift
/// between runs; not a cryptographic digest.
std::string checksum_hex(const std::string& data);

struct Artifact {
    std::string name;      // path relative to the output directory
    std::string checksum;  // checksum_hex of the bytes written
    std::size_t bytes = 0;
};

struct PipelineStatus {
    std::string name;
    bool ok = false;
    std::string detail;  // one-line human summary or error text
};

struct RunResult {
    std::vector<Artifact> artifacts;
    std::vector<PipelineStatus> pipelines;
    bool all_ok = false;
};

/// Write `content` under dir/name (creating directories), record it in
/// `result`.  Returns the absolute path written.
std::string write_artifact(const std::string& dir, const std::string& name,
                           const std::string& content, RunResult& result);

/// Execute the selected pipelines in canonical order, writing every
/// artifact plus manifest.json into cfg.out_dir.  Pipeline failures are
/// recorded per-pipeline and do not abort the run.
RunResult run_pipelines(const config::RunConfig& cfg);

}  // namespace lqw::report
