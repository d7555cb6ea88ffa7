#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sgp/linalg.hpp"
#include "sgp/metrics.hpp"

namespace sgp {

/// Shortest round-trip decimal form (17 significant digits).
std::string format_double(double v);

void write_matrix_csv(const Matrix& m, std::ostream& out);
void write_matrix_csv(const Matrix& m, const std::string& path);
Matrix read_matrix_csv(std::istream& in);
Matrix read_matrix_csv(const std::string& path);

void write_vectors_csv(const std::vector<Vector>& rows, const std::string& path);
/// Reads one vector per CSV row; all rows must have equal length.
std::vector<Vector> read_vectors_csv(const std::string& path);

/// Header: iter,f_mean,grad_norm_sq,consensus_err,max_consensus_err,sim_time
void write_metrics_csv(const std::vector<MetricsRecord>& records, std::ostream& out);
void write_metrics_jsonl(const std::vector<MetricsRecord>& records, std::ostream& out);
void write_final_state_json(const TrajectoryReport& report, std::ostream& out);

}  // namespace sgp
