#include "sing/io.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace sing::io {

namespace {

std::string format_double(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf, len);
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    out << (j ? ",c" : "c") << j;
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    bool numeric = true;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      const char* begin = line.data() + pos;
      const char* end = line.data() + comma;
      while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(begin, end, v);
      if (ec != std::errc() || ptr != end) {
        numeric = false;
        break;
      }
      row.push_back(v);
      pos = comma + 1;
    }
    if (!numeric) {
      if (first) {  // header row
        first = false;
        continue;
      }
      throw std::runtime_error("non-numeric data in " + path.string());
    }
    first = false;
    if (!rows.empty() && rows.front().size() != row.size())
      throw std::runtime_error("ragged rows in " + path.string());
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty matrix: " + path.string());
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_matrix_binary(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  if (!out) throw std::runtime_error("write failed: " + path.string());
  nlohmann::json sidecar{{"rows", m.rows()},
                         {"cols", m.cols()},
                         {"layout", "row-major"},
                         {"dtype", "float64-le"}};
  std::ofstream side(path.string() + ".json");
  side << sidecar.dump(2) << '\n';
}

Matrix read_matrix_binary(const std::filesystem::path& path) {
  std::ifstream side_in(path.string() + ".json");
  if (!side_in)
    throw std::runtime_error("missing sidecar for " + path.string());
  nlohmann::json sidecar = nlohmann::json::parse(side_in);
  const Eigen::Index rows = sidecar.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = sidecar.at("cols").get<Eigen::Index>();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      double v;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      if (!in) throw std::runtime_error("truncated binary: " + path.string());
      m(i, j) = v;
    }
  return m;
}

Matrix read_matrix(const std::filesystem::path& path) {
  return path.extension() == ".bin" ? read_matrix_binary(path)
                                    : read_matrix_csv(path);
}

void write_matrix(const std::filesystem::path& path, const Matrix& m,
                  bool binary) {
  if (binary)
    write_matrix_binary(path, m);
  else
    write_matrix_csv(path, m);
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buf[8192];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx",
                static_cast<unsigned long long>(hash));
  return std::string(out);
}

RunManifest::RunManifest(std::string command) {
  data_["command"] = std::move(command);
  data_["inputs"] = nlohmann::json::array();
  data_["outputs"] = nlohmann::json::array();
}

void RunManifest::set(const std::string& key, const nlohmann::json& value) {
  data_[key] = value;
}

void RunManifest::add_input(const std::filesystem::path& path) {
  data_["inputs"].push_back(
      {{"path", path.string()}, {"digest", file_digest(path)}});
}

void RunManifest::add_output(const std::filesystem::path& path) {
  data_["outputs"].push_back(path.string());
}

void RunManifest::set_wall_clock(double seconds) {
  data_["wall_clock_seconds"] = seconds;
}

void RunManifest::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << data_.dump(2) << '\n';
}

void write_simulation_truth(const std::filesystem::path& dir,
                            const SimulationTruth& truth) {
  std::filesystem::create_directories(dir);
  write_matrix_csv(dir / "X.csv", truth.X);
  write_matrix_csv(dir / "Y.csv", truth.Y);
  write_matrix_csv(dir / "M_J.csv", truth.M_J);
  write_matrix_csv(dir / "M_Ix.csv", truth.M_Ix);
  write_matrix_csv(dir / "M_Iy.csv", truth.M_Iy);
  write_matrix_csv(dir / "S_Jx.csv", truth.S_Jx);
  write_matrix_csv(dir / "S_Ix.csv", truth.S_Ix);
  write_matrix_csv(dir / "S_Jy.csv", truth.S_Jy);
  write_matrix_csv(dir / "S_Iy.csv", truth.S_Iy);
  write_matrix_csv(dir / "D_x.csv", truth.D_x.transpose());
  write_matrix_csv(dir / "D_y.csv", truth.D_y.transpose());

  RunManifest manifest("simulate");
  manifest.set("seed", truth.seed);
  manifest.set("sparse", truth.sparse);
  manifest.set("snr", {{"x", truth.snr_x}, {"y", truth.snr_y}});
  manifest.set("ranks", {{"r_x", truth.S_Jx.rows() + truth.S_Ix.rows()},
                         {"r_y", truth.S_Jy.rows() + truth.S_Iy.rows()},
                         {"r_J", truth.S_Jx.rows()}});
  manifest.set("r2",
               {{"x",
                 {{"joint", truth.r2_x.joint},
                  {"individual", truth.r2_x.individual},
                  {"noise", truth.r2_x.noise}}},
                {"y",
                 {{"joint", truth.r2_y.joint},
                  {"individual", truth.r2_y.individual},
                  {"noise", truth.r2_y.noise}}}});
  for (const char* name : {"X.csv", "Y.csv", "M_J.csv", "M_Ix.csv", "M_Iy.csv",
                           "S_Jx.csv", "S_Ix.csv", "S_Jy.csv", "S_Iy.csv",
                           "D_x.csv", "D_y.csv"})
    manifest.add_output((dir / name).string());
  manifest.write(dir / "manifest.json");
}

}  // namespace sing::io
