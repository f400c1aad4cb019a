#include "sojourn/field_io.hpp"

#include "sojourn/errors.hpp"

#include <array>
#include <bit>
#include <cstring>

namespace sojourn {
namespace {

template <typename T>
void put_le(unsigned char* dst, T value) {
  std::uint64_t bits = 0;
  if constexpr (std::is_same_v<T, double>) {
    bits = std::bit_cast<std::uint64_t>(value);
  } else {
    bits = value;
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) dst[i] = static_cast<unsigned char>(bits >> (8 * i));
}

template <typename T>
T get_le(const unsigned char* src) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(src[i]) << (8 * i);
  if constexpr (std::is_same_v<T, double>) {
    return std::bit_cast<double>(bits);
  } else {
    return static_cast<T>(bits);
  }
}

std::array<unsigned char, kFieldDumpHeaderBytes> encode(const FieldDumpHeader& h) {
  std::array<unsigned char, kFieldDumpHeaderBytes> b{};
  std::memcpy(b.data(), "SJRN", 4);
  put_le<std::uint32_t>(b.data() + 4, kFieldDumpVersion);
  put_le<std::uint32_t>(b.data() + 8, static_cast<std::uint32_t>(h.grid.d));
  put_le<std::uint32_t>(b.data() + 12, static_cast<std::uint32_t>(h.grid.n));
  put_le<double>(b.data() + 16, h.grid.h);
  put_le<double>(b.data() + 24, h.grid.T_grid());
  put_le<std::uint64_t>(b.data() + 32, h.seed);
  put_le<std::uint64_t>(b.data() + 40, h.count);
  put_le<std::uint64_t>(b.data() + 48, h.first_replicate);
  return b;
}

}  // namespace

FieldDumpWriter::FieldDumpWriter(const std::string& path, const FieldDumpHeader& header)
    : path_(path), header_(header), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError(path, "cannot open for writing");
  const auto bytes = encode(header);
  out_.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  if (!out_) throw IoError(path, "header write failed");
}

void FieldDumpWriter::append(std::span<const double> values) {
  if (values.size() != header_.grid.total_points()) throw GridMismatchError("field dump: wrong field size");
  if (written_ == header_.count) throw IoError(path_, "more fields than announced in the header");
  std::vector<unsigned char> bytes(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) put_le<double>(bytes.data() + 8 * i, values[i]);
  out_.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out_) throw IoError(path_, "write failed");
  ++written_;
}

void FieldDumpWriter::close() {
  out_.close();
  if (!out_) throw IoError(path_, "close failed");
  if (written_ != header_.count) throw IoError(path_, "fewer fields written than announced");
}

FieldDump read_field_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::array<unsigned char, kFieldDumpHeaderBytes> b{};
  in.read(reinterpret_cast<char*>(b.data()), b.size());
  if (in.gcount() != static_cast<std::streamsize>(b.size())) throw IoError(path, "truncated header");
  if (std::memcmp(b.data(), "SJRN", 4) != 0) throw IoError(path, "bad magic");
  if (get_le<std::uint32_t>(b.data() + 4) != kFieldDumpVersion) throw IoError(path, "unsupported version");

  FieldDump dump;
  FieldDumpHeader& h = dump.header;
  h.grid.d = static_cast<int>(get_le<std::uint32_t>(b.data() + 8));
  h.grid.n = get_le<std::uint32_t>(b.data() + 12);
  h.grid.h = get_le<double>(b.data() + 16);
  h.grid.T = get_le<double>(b.data() + 24);
  h.seed = get_le<std::uint64_t>(b.data() + 32);
  h.count = get_le<std::uint64_t>(b.data() + 40);
  h.first_replicate = get_le<std::uint64_t>(b.data() + 48);
  if ((h.grid.d != 1 && h.grid.d != 2) || h.grid.n < 2) throw IoError(path, "bad grid in header");

  const std::size_t points = h.grid.total_points();
  std::vector<unsigned char> bytes(points * 8);
  for (std::uint64_t k = 0; k < h.count; ++k) {
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) throw IoError(path, "truncated field data");
    FieldSample s;
    s.grid = h.grid;
    s.seed = h.seed;
    s.replicate_index = h.first_replicate + k;
    s.values.resize(points);
    for (std::size_t i = 0; i < points; ++i) s.values[i] = get_le<double>(bytes.data() + 8 * i);
    dump.fields.push_back(std::move(s));
  }
  return dump;
}

void write_field_dump(const std::string& path, const FieldSampler& sampler, std::uint64_t seed,
                      std::uint64_t count, std::uint64_t first_replicate) {
  FieldDumpHeader header;
  header.grid = sampler.grid();
  header.seed = seed;
  header.count = count;
  header.first_replicate = first_replicate;
  FieldDumpWriter writer(path, header);
  std::vector<double> field(sampler.grid().total_points());
  for (std::uint64_t k = 0; k < count; ++k) {
    sampler.sample_into(seed, first_replicate + k, field);
    writer.append(field);
  }
  writer.close();
}

}  // namespace sojourn
