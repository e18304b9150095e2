#include "mpfc/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace mpfc {

namespace {

void put(std::ostream& os, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

class Reader {
public:
  Reader(const std::string& path, const std::string& what) : what_(what), in_(path) {
    if (!in_) throw SchemaError(what + ": cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in_, line)) throw SchemaError(what + ": empty file");
    header_ = split_line(strip(line));
  }

  /// Exact-schema check: every expected column present, in order, nothing
  /// extra. `dim_wildcard` expands to y_1..y_m / u_1..u_m column runs.
  void expect_header(const std::vector<std::string>& names) {
    if (header_ != names) {
      for (const auto& n : names)
        if (std::find(header_.begin(), header_.end(), n) == header_.end())
          throw SchemaError(what_ + ": missing column '" + n + "'");
      throw SchemaError(what_ + ": header does not match the emitted schema");
    }
  }

  const std::vector<std::string>& header() const { return header_; }

  bool next_row(std::vector<std::string>& cells) {
    std::string line;
    while (std::getline(in_, line)) {
      line = strip(line);
      if (line.empty()) continue;
      cells = split_line(line);
      ++row_;
      if (cells.size() != header_.size())
        throw SchemaError(what_ + ": row " + std::to_string(row_) + " has " +
                          std::to_string(cells.size()) + " cells, expected " +
                          std::to_string(header_.size()));
      return true;
    }
    return false;
  }

  double num(const std::vector<std::string>& cells, std::size_t col) {
    const std::string& s = cells[col];
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size())
      throw SchemaError(what_ + ": row " + std::to_string(row_) + ", column '" + header_[col] +
                        "': not a number: '" + s + "'");
    return v;
  }

private:
  static std::string strip(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.pop_back();
    return s;
  }

  std::string what_;
  std::ifstream in_;
  std::vector<std::string> header_;
  long row_ = 0;
};

std::vector<std::string> trajectory_header(int dim) {
  std::vector<std::string> names{"t"};
  for (int i = 1; i <= dim; ++i) names.push_back("y_" + std::to_string(i));
  for (int i = 1; i <= dim; ++i) names.push_back("u_" + std::to_string(i));
  names.insert(names.end(), {"phi", "norm_y", "step_index"});
  return names;
}

const std::vector<std::string> kStepsHeader = {"i",   "t_i",             "c_star",
                                               "T_star", "J_H",          "stage_increment",
                                               "opt_evals", "accepted_from"};

} // namespace

void write_trajectory_csv(std::ostream& os, const ClosedLoopRecord& record, int dim) {
  bool first = true;
  for (const auto& name : trajectory_header(dim)) {
    os << (first ? "" : ",") << name;
    first = false;
  }
  os << "\n";
  for (std::size_t k = 0; k < record.t.size(); ++k) {
    put(os, record.t[k]);
    for (int i = 0; i < dim; ++i) {
      os << ",";
      put(os, record.y[k][i]);
    }
    for (int i = 0; i < dim; ++i) {
      os << ",";
      put(os, record.u[k][i]);
    }
    os << ",";
    put(os, record.phi[k]);
    os << ",";
    put(os, record.y[k].norm());
    os << "," << record.step_index[k] << "\n";
  }
}

void write_steps_csv(std::ostream& os, const ClosedLoopRecord& record) {
  bool first = true;
  for (const auto& name : kStepsHeader) {
    os << (first ? "" : ",") << name;
    first = false;
  }
  os << "\n";
  for (const StepRecord& s : record.steps) {
    os << s.index << ",";
    put(os, s.t_i);
    os << ",";
    put(os, s.params.c);
    os << ",";
    put(os, s.params.T);
    os << ",";
    put(os, s.J);
    os << ",";
    put(os, s.stage_increment);
    os << "," << s.opt_evaluations << "," << accepted_from_name(s.accepted_from) << "\n";
  }
}

void write_landscape_csv(std::ostream& os, const std::vector<Evaluation>& log) {
  os << "c,T,J,feasible\n";
  for (const Evaluation& e : log) {
    put(os, e.params.c);
    os << ",";
    put(os, e.params.T);
    os << ",";
    put(os, e.J);
    os << "," << (e.feasible ? 1 : 0) << "\n";
  }
}

TrajectoryFile read_trajectory_csv(const std::string& path) {
  Reader reader(path, "trajectory.csv");
  // Infer the dimension from the y_* run, then demand the exact schema.
  int dim = 0;
  for (const auto& name : reader.header())
    if (name.rfind("y_", 0) == 0) ++dim;
  if (dim == 0) throw SchemaError("trajectory.csv: missing column 'y_1'");
  reader.expect_header(trajectory_header(dim));

  TrajectoryFile out;
  out.dim = dim;
  std::vector<std::string> cells;
  while (reader.next_row(cells)) {
    std::size_t col = 0;
    out.t.push_back(reader.num(cells, col++));
    Eigen::VectorXd y(dim), u(dim);
    for (int i = 0; i < dim; ++i) y[i] = reader.num(cells, col++);
    for (int i = 0; i < dim; ++i) u[i] = reader.num(cells, col++);
    out.y.push_back(std::move(y));
    out.u.push_back(std::move(u));
    out.phi.push_back(reader.num(cells, col++));
    out.norm_y.push_back(reader.num(cells, col++));
    out.step_index.push_back(static_cast<int>(reader.num(cells, col++)));
  }
  return out;
}

StepsFile read_steps_csv(const std::string& path) {
  Reader reader(path, "steps.csv");
  reader.expect_header(kStepsHeader);
  StepsFile out;
  std::vector<std::string> cells;
  while (reader.next_row(cells)) {
    out.index.push_back(static_cast<int>(reader.num(cells, 0)));
    out.t_i.push_back(reader.num(cells, 1));
    out.c_star.push_back(reader.num(cells, 2));
    out.T_star.push_back(reader.num(cells, 3));
    out.J.push_back(reader.num(cells, 4));
    out.increment.push_back(reader.num(cells, 5));
    out.opt_evals.push_back(static_cast<int>(reader.num(cells, 6)));
    out.accepted_from.push_back(cells[7]);
  }
  return out;
}

std::vector<StepCostView> StepsFile::cost_views() const {
  std::vector<StepCostView> views;
  views.reserve(J.size());
  for (std::size_t i = 0; i < J.size(); ++i) views.push_back({J[i], increment[i], c_star[i]});
  return views;
}

LandscapeFile read_landscape_csv(const std::string& path) {
  Reader reader(path, "landscape.csv");
  reader.expect_header({"c", "T", "J", "feasible"});
  LandscapeFile out;
  std::vector<std::string> cells;
  while (reader.next_row(cells)) {
    out.c.push_back(reader.num(cells, 0));
    out.T.push_back(reader.num(cells, 1));
    out.J.push_back(reader.num(cells, 2));
    out.feasible.push_back(reader.num(cells, 3) != 0.0);
  }
  return out;
}

} // namespace mpfc
