#pragma once

#include "sojourn/field_sampler.hpp"

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace sojourn {

/// Binary dump of sampled fields. A 64-byte little-endian header
///
///   offset  0  char[4]  "SJRN"
///           4  u32      version (1)
///           8  u32      d
///          12  u32      n per axis
///          16  f64      h
///          24  f64      T (grid edge h(n-1))
///          32  u64      master seed
///          40  u64      number of fields
///          48  u64      replicate index of the first field
///          56  u64      reserved, zero
///
/// is followed by the fields back to back, each n^d little-endian doubles in
/// row-major order. Field k is replicate first + k.
inline constexpr std::uint32_t kFieldDumpVersion = 1;
inline constexpr std::size_t kFieldDumpHeaderBytes = 64;

struct FieldDumpHeader {
  GridSpec grid;
  std::uint64_t seed = 0;
  std::uint64_t count = 0;
  std::uint64_t first_replicate = 0;
};

class FieldDumpWriter {
 public:
  /// Writes a header announcing `count` fields; exactly that many must be appended.
  FieldDumpWriter(const std::string& path, const FieldDumpHeader& header);
  void append(std::span<const double> values);
  /// Throws IoError if fewer fields than announced were written.
  void close();

 private:
  std::string path_;
  FieldDumpHeader header_;
  std::ofstream out_;
  std::uint64_t written_ = 0;
};

struct FieldDump {
  FieldDumpHeader header;
  std::vector<FieldSample> fields;
};

FieldDump read_field_dump(const std::string& path);

/// Samples replicates first .. first+count-1 of `sampler` into a dump file.
void write_field_dump(const std::string& path, const FieldSampler& sampler, std::uint64_t seed,
                      std::uint64_t count, std::uint64_t first_replicate = 0);

}  // namespace sojourn
