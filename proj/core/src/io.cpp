#include "gmop/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "gmop/error.hpp"

namespace gmop {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& rec) {
  os << "k,agent,mode,mu,sigma,alpha,y\n";
  for (std::size_t k = 0; k < rec.steps; ++k) {
    for (std::size_t j = 0; j < rec.agents; ++j) {
      const std::string y = format_double(rec.y(k, j));
      for (std::size_t i = 0; i < rec.modes; ++i) {
        os << (k + 1) << ',' << (j + 1) << ',' << (i + 1) << ',' << format_double(rec.mu(k, j, i))
           << ',' << format_double(rec.sigma(k, j, i)) << ',' << format_double(rec.alpha(k, j, i))
           << ',' << y << '\n';
      }
    }
  }
}

namespace {

double parse_number(const std::string& field, std::size_t line_no) {
  if (field == "nan") return std::nan("");
  if (field == "inf") return HUGE_VAL;
  if (field == "-inf") return -HUGE_VAL;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != field.size() || field.empty()) {
    throw ParseError("trajectory line " + std::to_string(line_no) + ": bad number '" + field + "'");
  }
  return v;
}

}  // namespace

TrajectoryRecord read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "k,agent,mode,mu,sigma,alpha,y") {
    throw ParseError("trajectory: expected header k,agent,mode,mu,sigma,alpha,y");
  }
  struct Row {
    std::size_t k, j, i;
    double mu, sigma, alpha, y;
  };
  std::vector<Row> rows;
  std::size_t line_no = 1;
  std::size_t steps = 0, agents = 0, modes = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 7) throw ParseError("trajectory line " + std::to_string(line_no) + ": need 7 fields");
    Row r{};
    r.k = static_cast<std::size_t>(parse_number(f[0], line_no));
    r.j = static_cast<std::size_t>(parse_number(f[1], line_no));
    r.i = static_cast<std::size_t>(parse_number(f[2], line_no));
    if (r.k < 1 || r.j < 1 || r.i < 1) {
      throw ParseError("trajectory line " + std::to_string(line_no) + ": ids are 1-based");
    }
    r.mu = parse_number(f[3], line_no);
    r.sigma = parse_number(f[4], line_no);
    r.alpha = parse_number(f[5], line_no);
    r.y = parse_number(f[6], line_no);
    steps = std::max(steps, r.k);
    agents = std::max(agents, r.j);
    modes = std::max(modes, r.i);
    rows.push_back(r);
  }
  if (rows.size() != steps * agents * modes) {
    throw ParseError("trajectory: rows do not form a complete k x agent x mode table");
  }

  TrajectoryRecord rec;
  rec.steps = steps;
  rec.agents = agents;
  rec.modes = modes;
  const std::size_t cells = steps * agents * modes;
  rec.mean.assign(cells, 0.0);
  rec.variance.assign(cells, 0.0);
  rec.weight.assign(cells, 0.0);
  std::vector<double> y(steps * agents, 0.0);
  for (const Row& r : rows) {
    const std::size_t at = rec.index(r.k - 1, r.j - 1, r.i - 1);
    rec.mean[at] = r.mu;
    rec.variance[at] = r.sigma;
    rec.weight[at] = r.alpha;
    y[(r.k - 1) * agents + (r.j - 1)] = r.y;
  }
  bool shared = true;
  for (std::size_t k = 0; k < steps && shared; ++k) {
    for (std::size_t j = 1; j < agents; ++j) {
      const double a = y[k * agents], b = y[k * agents + j];
      if (!(a == b || (std::isnan(a) && std::isnan(b)))) {
        shared = false;
        break;
      }
    }
  }
  rec.per_agent_observations = !shared;
  if (shared) {
    rec.observations.resize(steps);
    for (std::size_t k = 0; k < steps; ++k) rec.observations[k] = y[k * agents];
  } else {
    rec.observations = std::move(y);
  }
  return rec;
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << contents;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void save_edge_list(const std::filesystem::path& path, const SocialGraph& g) {
  std::ostringstream os;
  write_edge_list(os, g);
  write_text_file(path, os.str());
}

SocialGraph load_edge_list(const std::filesystem::path& path) {
  std::istringstream is(read_text_file(path));
  return read_edge_list(is);
}

}  // namespace gmop
