#include "meshwave/container.hpp"

#include "meshwave/error.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>
#include <type_traits>
#include <unistd.h>

namespace meshwave {

namespace {

using Index = Eigen::Index;

template <class T>
void append_le(std::string& out, T value) {
  static_assert(std::is_integral_v<T>);
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>(u & 0xff));
    u = static_cast<U>(u >> 8);
  }
}

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  template <class T>
  T read() {
    need(sizeof(T));
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      u |= static_cast<std::make_unsigned_t<T>>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }

  std::string_view bytes(std::size_t count) {
    need(count);
    const std::string_view out = data_.substr(pos_, count);
    pos_ += count;
    return out;
  }

 private:
  void need(std::size_t count) const {
    if (count > data_.size() - pos_) throw Error(ErrorCode::FormatError, "container truncated");
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

std::size_t dtype_size(DType dtype) {
  switch (dtype) {
    case DType::F64: return 8;
    case DType::I64: return 8;
    case DType::U8: return 1;
  }
  throw Error(ErrorCode::FormatError, "unknown dtype");
}

std::string encode_f64(const double* values, std::size_t count) {
  std::string out;
  out.reserve(count * 8);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, values + i, 8);
    append_le(out, bits);
  }
  return out;
}

std::vector<double> decode_f64(const std::string& bytes) {
  Reader r(bytes);
  std::vector<double> out(bytes.size() / 8);
  for (double& v : out) {
    const auto bits = r.read<std::uint64_t>();
    std::memcpy(&v, &bits, 8);
  }
  return out;
}

}  // namespace

std::string magic_name(const Magic& magic) {
  std::string out;
  for (char c : magic) {
    if (c == '\0') break;
    out.push_back(c);
  }
  return out;
}

void Container::put(const std::string& name, const Eigen::MatrixXd& value) {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = value;
  entries_[name] = {DType::F64,
                    {static_cast<std::uint64_t>(value.rows()), static_cast<std::uint64_t>(value.cols())},
                    encode_f64(rm.data(), static_cast<std::size_t>(rm.size()))};
}

void Container::put(const std::string& name, const Eigen::VectorXd& value) {
  entries_[name] = {DType::F64, {static_cast<std::uint64_t>(value.size())},
                    encode_f64(value.data(), static_cast<std::size_t>(value.size()))};
}

void Container::put(const std::string& name, const std::vector<double>& value) {
  entries_[name] = {DType::F64, {value.size()}, encode_f64(value.data(), value.size())};
}

void Container::put(const std::string& name, const std::vector<std::int64_t>& value) {
  std::string bytes;
  for (std::int64_t v : value) append_le(bytes, v);
  entries_[name] = {DType::I64, {value.size()}, std::move(bytes)};
}

void Container::put(const std::string& name, const std::vector<int>& value) {
  put(name, std::vector<std::int64_t>(value.begin(), value.end()));
}

void Container::put_scalar(const std::string& name, double value) {
  entries_[name] = {DType::F64, {}, encode_f64(&value, 1)};
}

void Container::put_integer(const std::string& name, std::int64_t value) {
  std::string bytes;
  append_le(bytes, value);
  entries_[name] = {DType::I64, {}, std::move(bytes)};
}

void Container::put_text(const std::string& name, std::string_view text) {
  entries_[name] = {DType::U8, {text.size()}, std::string(text)};
}

const Tensor& Container::get(const std::string& name, DType dtype) const {
  const auto it = entries_.find(name);
  if (it == entries_.end()) throw Error(ErrorCode::FormatError, "missing entry '" + name + "'");
  if (it->second.dtype != dtype) throw Error(ErrorCode::FormatError, "entry '" + name + "' has the wrong dtype");
  return it->second;
}

Eigen::MatrixXd Container::matrix(const std::string& name) const {
  const Tensor& t = get(name, DType::F64);
  if (t.shape.size() != 2) throw Error(ErrorCode::FormatError, "entry '" + name + "' is not a matrix");
  const std::vector<double> values = decode_f64(t.bytes);
  const auto rows = static_cast<Index>(t.shape[0]);
  const auto cols = static_cast<Index>(t.shape[1]);
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(values.data(), rows,
                                                                                                    cols);
}

Eigen::VectorXd Container::vector(const std::string& name) const {
  const Tensor& t = get(name, DType::F64);
  if (t.shape.size() != 1) throw Error(ErrorCode::FormatError, "entry '" + name + "' is not a vector");
  const std::vector<double> values = decode_f64(t.bytes);
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
}

std::vector<std::int64_t> Container::integers(const std::string& name) const {
  const Tensor& t = get(name, DType::I64);
  if (t.shape.size() != 1) throw Error(ErrorCode::FormatError, "entry '" + name + "' is not a vector");
  Reader r(t.bytes);
  std::vector<std::int64_t> out(t.bytes.size() / 8);
  for (auto& v : out) v = r.read<std::int64_t>();
  return out;
}

std::vector<int> Container::ints(const std::string& name) const {
  const std::vector<std::int64_t> wide = integers(name);
  return {wide.begin(), wide.end()};
}

double Container::scalar(const std::string& name) const {
  const Tensor& t = get(name, DType::F64);
  if (!t.shape.empty()) throw Error(ErrorCode::FormatError, "entry '" + name + "' is not a scalar");
  return decode_f64(t.bytes).at(0);
}

std::int64_t Container::integer(const std::string& name) const {
  const Tensor& t = get(name, DType::I64);
  if (!t.shape.empty()) throw Error(ErrorCode::FormatError, "entry '" + name + "' is not a scalar");
  return Reader(t.bytes).read<std::int64_t>();
}

std::string Container::text(const std::string& name) const { return get(name, DType::U8).bytes; }

std::string Container::serialize() const {
  std::string header(magic_.data(), magic_.size());
  append_le(header, kContainerVersion);
  append_le(header, static_cast<std::uint32_t>(entries_.size()));

  std::size_t table_size = 0;
  for (const auto& [name, t] : entries_) table_size += 4 + name.size() + 1 + 4 + 8 * t.shape.size() + 16;
  std::uint64_t offset = header.size() + table_size;

  std::string table;
  for (const auto& [name, t] : entries_) {
    append_le(table, static_cast<std::uint32_t>(name.size()));
    table += name;
    table.push_back(static_cast<char>(t.dtype));
    append_le(table, static_cast<std::uint32_t>(t.shape.size()));
    for (std::uint64_t d : t.shape) append_le(table, d);
    append_le(table, offset);
    append_le(table, static_cast<std::uint64_t>(t.bytes.size()));
    offset += t.bytes.size();
  }
  std::string out = header + table;
  for (const auto& [name, t] : entries_) out += t.bytes;
  return out;
}

Container Container::parse(std::string_view data, const Magic& expected) {
  if (data.size() < 8 || std::memcmp(data.data(), expected.data(), 8) != 0) {
    throw Error(ErrorCode::FormatError, "bad magic (expected " + magic_name(expected) + ")");
  }
  Reader r(data.substr(8));
  const auto version = r.read<std::uint32_t>();
  if (version != kContainerVersion) {
    throw Error(ErrorCode::FormatError, "unsupported container version " + std::to_string(version));
  }
  const auto count = r.read<std::uint32_t>();
  Container c(expected);
  for (std::uint32_t e = 0; e < count; ++e) {
    const auto name_len = r.read<std::uint32_t>();
    std::string name(r.bytes(name_len));
    Tensor t;
    const auto dtype = r.read<std::uint8_t>();
    if (dtype > static_cast<std::uint8_t>(DType::U8)) throw Error(ErrorCode::FormatError, "unknown dtype");
    t.dtype = static_cast<DType>(dtype);
    const auto rank = r.read<std::uint32_t>();
    if (rank > 8) throw Error(ErrorCode::FormatError, "entry '" + name + "' has rank " + std::to_string(rank));
    std::uint64_t elements = 1;
    for (std::uint32_t k = 0; k < rank; ++k) {
      t.shape.push_back(r.read<std::uint64_t>());
      elements *= t.shape.back();
    }
    const auto offset = r.read<std::uint64_t>();
    const auto length = r.read<std::uint64_t>();
    if (length != elements * dtype_size(t.dtype) || offset > data.size() || length > data.size() - offset) {
      throw Error(ErrorCode::FormatError, "entry '" + name + "' extends past the end of the file");
    }
    t.bytes = std::string(data.substr(offset, length));
    c.entries_.emplace(std::move(name), std::move(t));
  }
  return c;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename into " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_container(const Container& container, const std::filesystem::path& path) {
  write_file_atomic(path, container.serialize());
}

Container read_container(const std::filesystem::path& path, const Magic& expected) {
  return Container::parse(read_file(path), expected);
}

}  // namespace meshwave
