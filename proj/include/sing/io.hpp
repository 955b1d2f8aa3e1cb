#pragma once

#include <filesystem>
#include <string>

#include "sing/simulate.hpp"
#include "sing/types.hpp"

#include <json.hpp>

namespace sing::io {

/// Writes a matrix as CSV with a header row of column ids (c0, c1, ...).
/// Values use max-precision round-trip formatting, so identical matrices
/// produce identical bytes.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

/// Reads a CSV matrix; a non-numeric first row is treated as a header.
Matrix read_matrix_csv(const std::filesystem::path& path);

/// Raw little-endian float64, row-major, with a JSON sidecar
/// (<file>.json holding rows/cols/layout).
void write_matrix_binary(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_binary(const std::filesystem::path& path);

/// Dispatch on extension: ".bin" binary, anything else CSV.
Matrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Matrix& m,
                  bool binary = false);

/// FNV-1a digest of a file's bytes, as a hex string (for run manifests).
std::string file_digest(const std::filesystem::path& path);

/// One manifest per run: command, configuration snapshot, seeds, input
/// digests, output paths, wall-clock seconds, convergence flags.
class RunManifest {
 public:
  explicit RunManifest(std::string command);

  void set(const std::string& key, const nlohmann::json& value);
  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);
  void set_wall_clock(double seconds);

  const nlohmann::json& json() const { return data_; }
  void write(const std::filesystem::path& path) const;

 private:
  nlohmann::json data_;
};

/// SimulationTruth as a directory of CSV matrices plus manifest.json.
void write_simulation_truth(const std::filesystem::path& dir,
                            const SimulationTruth& truth);

}  // namespace sing::io
