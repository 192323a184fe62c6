#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace meshwave {

// Versioned binary container shared by spectrum caches, filter-bank caches
// and checkpoints.
//
// Layout (little-endian):
//   8-byte magic, u32 version, u32 entry count,
//   per entry: u32 name length, name bytes, u8 dtype, u32 rank, u64 dims[rank],
//              u64 byte offset (from file start), u64 byte length,
//   then the raw arrays (row-major).
using Magic = std::array<char, 8>;

inline constexpr Magic kSpectrumMagic = {'S', 'P', 'E', 'C', '1', '\0', '\0', '\0'};
inline constexpr Magic kFilterBankMagic = {'F', 'B', 'K', '1', '\0', '\0', '\0', '\0'};
inline constexpr Magic kCheckpointMagic = {'C', 'K', 'P', 'T', '1', '\0', '\0', '\0'};
inline constexpr std::uint32_t kContainerVersion = 1;

enum class DType : std::uint8_t { F64 = 0, I64 = 1, U8 = 2 };

struct Tensor {
  DType dtype = DType::F64;
  std::vector<std::uint64_t> shape;
  std::string bytes;
};

class Container {
 public:
  explicit Container(Magic magic = kSpectrumMagic) : magic_(magic) {}

  const Magic& magic() const noexcept { return magic_; }
  const std::map<std::string, Tensor>& entries() const noexcept { return entries_; }
  bool has(const std::string& name) const { return entries_.count(name) != 0; }

  void put(const std::string& name, const Eigen::MatrixXd& value);
  void put(const std::string& name, const Eigen::VectorXd& value);
  void put(const std::string& name, const std::vector<double>& value);
  void put(const std::string& name, const std::vector<std::int64_t>& value);
  void put(const std::string& name, const std::vector<int>& value);
  void put_scalar(const std::string& name, double value);
  void put_integer(const std::string& name, std::int64_t value);
  void put_text(const std::string& name, std::string_view text);

  // Throw FormatError when the entry is missing or has the wrong dtype/rank.
  Eigen::MatrixXd matrix(const std::string& name) const;
  Eigen::VectorXd vector(const std::string& name) const;
  std::vector<std::int64_t> integers(const std::string& name) const;
  std::vector<int> ints(const std::string& name) const;
  double scalar(const std::string& name) const;
  std::int64_t integer(const std::string& name) const;
  std::string text(const std::string& name) const;

  std::string serialize() const;
  static Container parse(std::string_view data, const Magic& expected);

 private:
  const Tensor& get(const std::string& name, DType dtype) const;

  Magic magic_;
  std::map<std::string, Tensor> entries_;
};

// Writes to a sibling temporary and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

void write_container(const Container& container, const std::filesystem::path& path);
Container read_container(const std::filesystem::path& path, const Magic& expected);

std::string magic_name(const Magic& magic);

}  // namespace meshwave
