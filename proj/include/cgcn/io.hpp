#pragma once

#include "cgcn/trainer.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace cgcn {

/// Malformed input text; the message carries file and line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Unreadable, corrupt or incompatible model archive.
class ArchiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Configuration: flat `key = value` text, '#' starts a comment.

TrainConfig parse_config(std::istream& in, const std::string& source = "<config>");
TrainConfig load_config(const std::filesystem::path& path);
/// Canonical text form; parse_config(format_config(c)) reproduces c.
std::string format_config(const TrainConfig& config);
/// Documentation of every key, shown by `--help`.
std::string config_help();

// ---------------------------------------------------------------------------
// TUDataset plain-text layout.

enum class FeatureSource { kNodeAttributes, kOneHotNodeLabels, kConstantOnes };

struct DatasetManifest {
  std::string name;
  std::filesystem::path directory;
  std::size_t graphs = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;  // undirected edges after symmetrization
  int classes = 0;
  FeatureSource features = FeatureSource::kConstantOnes;
};

std::string_view to_string(FeatureSource source);

/// Reads <name>_A.txt, <name>_graph_indicator.txt, <name>_graph_labels.txt
/// and, when present, <name>_node_attributes.txt or <name>_node_labels.txt.
Dataset load_tudataset(const std::filesystem::path& dir, const std::string& name,
                       DatasetManifest* manifest = nullptr);

/// Writes `ds` in the same layout (node features as attributes). Labels are
/// written as stored, i.e. already contiguous from 0.
void write_tudataset(const Dataset& ds, const std::filesystem::path& dir, const std::string& name);

// ---------------------------------------------------------------------------
// Model archive: versioned binary, little-endian, row-major float64
// matrices with explicit shapes, CRC-32 trailer.

inline constexpr std::uint32_t kArchiveVersion = 1;

struct ModelArchive {
  std::uint32_t version = kArchiveVersion;
  std::string config_echo;
  CgcnModel model;
};

std::string serialize_model(const CgcnModel& model, const std::string& config_echo = {});
ModelArchive deserialize_model(const std::string& bytes);

void save_model(const CgcnModel& model, const std::filesystem::path& path, const std::string& config_echo = {});
ModelArchive load_model(const std::filesystem::path& path);

/// CRC-32 stored in the trailer of a serialized archive.
std::uint32_t archive_checksum(const std::string& bytes);

}  // namespace cgcn
