#include "sgp/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sgp/error.hpp"

namespace sgp {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix_csv(const Matrix& m, std::ostream& out) {
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

void write_matrix_csv(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  write_matrix_csv(m, out);
}

namespace {

std::vector<Vector> read_rows(std::istream& in) {
  std::vector<Vector> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Vector row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError("CSV: cannot parse number '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  for (const auto& r : rows) {
    if (r.size() != rows.front().size()) throw ShapeError("CSV: ragged rows");
  }
  return rows;
}

}  // namespace

Matrix read_matrix_csv(std::istream& in) {
  const auto rows = read_rows(in);
  if (rows.empty()) throw ShapeError("CSV: empty matrix");
  Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return m;
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_matrix_csv(in);
}

void write_vectors_csv(const std::vector<Vector>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << format_double(row[c]);
    }
    out << '\n';
  }
}

std::vector<Vector> read_vectors_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_rows(in);
}

bool MetricsRecord::finite() const {
  return std::isfinite(f_mean) && std::isfinite(grad_norm_sq) && std::isfinite(consensus_err) &&
         std::isfinite(max_consensus_err) && std::isfinite(sim_time);
}

void write_metrics_csv(const std::vector<MetricsRecord>& records, std::ostream& out) {
  out << "iter,f_mean,grad_norm_sq,consensus_err,max_consensus_err,sim_time\n";
  for (const auto& r : records) {
    out << r.iteration << ',' << format_double(r.f_mean) << ',' << format_double(r.grad_norm_sq)
        << ',' << format_double(r.consensus_err) << ',' << format_double(r.max_consensus_err)
        << ',' << format_double(r.sim_time) << '\n';
  }
}

void write_metrics_jsonl(const std::vector<MetricsRecord>& records, std::ostream& out) {
  for (const auto& r : records) {
    nlohmann::ordered_json row;
    row["iter"] = r.iteration;
    row["f_mean"] = r.f_mean;
    row["grad_norm_sq"] = r.grad_norm_sq;
    row["consensus_err"] = r.consensus_err;
    row["max_consensus_err"] = r.max_consensus_err;
    row["sim_time"] = r.sim_time;
    out << row.dump() << '\n';
  }
}

void write_final_state_json(const TrajectoryReport& report, std::ostream& out) {
  nlohmann::ordered_json doc;
  doc["mean_x"] = report.final_mean_x;
  doc["z"] = report.final_z;
  doc["diverged"] = report.diverged;
  out << doc.dump(2) << '\n';
}

}  // namespace sgp
