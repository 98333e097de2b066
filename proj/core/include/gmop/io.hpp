#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "gmop/dynamics.hpp"
#include "gmop/network.hpp"

namespace gmop {

/// "%.17g"; non-finite values become nan / inf / -inf.
std::string format_double(double v);

/// Header `k,agent,mode,mu,sigma,alpha,y`; k, agent and mode are 1-based.
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& rec);
TrajectoryRecord read_trajectory_csv(std::istream& is);

void write_text_file(const std::filesystem::path& path, const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

void save_edge_list(const std::filesystem::path& path, const SocialGraph& g);
SocialGraph load_edge_list(const std::filesystem::path& path);

}  // namespace gmop
