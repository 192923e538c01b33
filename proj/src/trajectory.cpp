#include "msnar/trajectory.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "msnar/common.hpp"

namespace msnar {

void Trajectory::validate(int m) const {
  if (y.size() < 2) throw ConfigError("trajectory needs at least two observations (n >= 1)");
  if (!x.empty()) {
    if (x.size() != y.size() - 1)
      throw ConfigError("regime path length must be one less than the observation count");
    for (int label : x)
      if (label < 0 || label >= m)
        throw ConfigError("regime label " + std::to_string(label + 1) + " outside {1.." +
                          std::to_string(m) + "}");
  }
}

std::string trajectory_to_csv(const Trajectory& traj, std::uint64_t model_hash) {
  std::ostringstream out;
  char hash_hex[20];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(model_hash));
  out << "# msnar trajectory v1\n";
  out << "# model_hash=" << hash_hex << "\n";
  out << "# seed=" << traj.seed << "\n";
  out << "# burn_in=" << traj.burn_in << "\n";
  out << "k,y,x\n";
  for (std::size_t k = 0; k < traj.y.size(); ++k) {
    out << k << ',' << format_double(traj.y[k]) << ',';
    if (k >= 1 && traj.x_observed()) out << traj.x[k - 1] + 1;
    out << '\n';
  }
  return out.str();
}

Trajectory trajectory_from_csv(const std::string& text) {
  Trajectory traj;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        const std::string key = line.substr(2, eq - 2);
        const std::string value = line.substr(eq + 1);
        if (key == "seed") traj.seed = std::stoull(value);
        if (key == "burn_in") traj.burn_in = std::stoi(value);
      }
      continue;
    }
    if (!header_seen) {
      if (line != "k,y,x") throw ConfigError("unexpected trajectory CSV header: " + line);
      header_seen = true;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw ConfigError("malformed trajectory CSV row: " + line);
    traj.y.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
    const std::string xs = line.substr(c2 + 1);
    if (!xs.empty()) traj.x.push_back(std::stoi(xs) - 1);
  }
  if (traj.y.size() < 2) throw ConfigError("trajectory CSV contains fewer than two observations");
  if (!traj.x.empty() && traj.x.size() != traj.y.size() - 1)
    throw ConfigError("trajectory CSV has a partial regime column");
  return traj;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << contents;
  if (!out) throw ConfigError("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace msnar
