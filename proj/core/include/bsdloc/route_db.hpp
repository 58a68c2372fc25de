#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "bsdloc/bit_string.hpp"
#include "bsdloc/routes.hpp"

namespace bsdloc {

/// Fixed-width rows of packed bits.
class PackedRows {
 public:
  PackedRows() = default;
  explicit PackedRows(std::size_t bits) : bits_(bits), stride_(words_for_bits(bits)) {}

  std::size_t bits() const { return bits_; }
  std::size_t stride() const { return stride_; }
  std::size_t size() const { return rows_; }
  std::span<const Word> row(std::size_t i) const { return {data_.data() + i * stride_, stride_}; }
  std::span<Word> push_row();
  BitString to_bit_string(std::size_t i) const;
  void reserve(std::size_t rows) { data_.reserve(rows * stride_); }
  std::size_t memory_bytes() const { return data_.capacity() * sizeof(Word); }

 private:
  std::size_t bits_ = 0;
  std::size_t stride_ = 0;
  std::size_t rows_ = 0;
  std::vector<Word> data_;
};

/// All stored routes of one length. Route i is its parent (a route of
/// length - 1) extended by `last[i]`; the length-1 table lists locations.
struct RouteTable {
  std::size_t length = 0;
  std::vector<std::uint32_t> parent;
  std::vector<LocationId> last;
  /// Children of parent p occupy [child_begin[p], child_begin[p + 1]).
  std::vector<std::uint64_t> child_begin;
  PackedRows descriptors;
  PackedRows turns;
  bool truncated = false;

  std::size_t size() const { return last.size(); }
};

struct RouteRef {
  std::uint32_t length = 0;
  std::uint32_t index = 0;
  friend bool operator==(const RouteRef&, const RouteRef&) = default;
};

struct LengthStorage {
  std::size_t length = 0;
  std::uint64_t route_count = 0;
  std::uint64_t descriptor_bytes = 0;
  std::uint64_t turn_bytes = 0;
  std::uint64_t id_bytes = 0;
  std::uint64_t record_bytes = 0;
  std::uint64_t section_bytes = 0;
};

inline constexpr std::size_t kDbHeaderBytes = 8 + 4 + 8 + 4 + 8 + 4;
inline constexpr std::size_t kDbSectionHeaderBytes = 4 + 8 + 4 + 4;

/// Arithmetic only: descriptor payload is ceil(4L/8) bytes per route, records
/// add 4 bytes per location id and ceil((L-1)/8) turn bytes.
LengthStorage storage_for(std::size_t length, std::uint64_t route_count);
std::uint64_t database_file_bytes(std::span<const LengthStorage> sections);

class DatabaseFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Routes of lengths 1..max_length over a location graph, built lazily.
///
/// table(L) builds every shorter table first. Built tables are immutable and
/// safe to read from several threads.
class RouteDatabase {
 public:
  RouteDatabase(std::shared_ptr<const LocationGraph> graph, std::size_t max_length,
                std::optional<std::size_t> per_length_limit = std::nullopt);

  const LocationGraph& graph() const { return *graph_; }
  std::shared_ptr<const LocationGraph> graph_ptr() const { return graph_; }
  std::size_t max_length() const { return tables_.size(); }
  std::optional<std::size_t> per_length_limit() const { return limit_; }

  const RouteTable& table(std::size_t length) const;
  bool built(std::size_t length) const;
  /// Largest L such that tables 1..L are built.
  std::size_t built_length() const;

  std::vector<LocationId> route(RouteRef r) const;
  void route_into(RouteRef r, std::vector<LocationId>& out) const;
  std::vector<PlaceId> route_places(RouteRef r) const;
  LocationId last_location(RouteRef r) const { return table(r.length).last[r.index]; }
  BitString descriptor(RouteRef r) const;
  BitString turns(RouteRef r) const;
  std::optional<std::uint32_t> find(std::span<const LocationId> route) const;

  LengthStorage storage(std::size_t length) const;

  /// Writes tables 1..up_to (default: every built table).
  void save(std::ostream& out, std::optional<std::size_t> up_to = std::nullopt) const;
  /// Rebuilds tables from a file written by save(); the fingerprint must match `graph`.
  static RouteDatabase load(std::istream& in, std::shared_ptr<const LocationGraph> graph,
                            std::optional<std::size_t> max_length = std::nullopt);

 private:
  struct Slot {
    std::once_flag once;
    std::unique_ptr<RouteTable> table;
  };

  void build_table(std::size_t length) const;

  std::shared_ptr<const LocationGraph> graph_;
  std::optional<std::size_t> limit_;
  std::vector<std::unique_ptr<Slot>> tables_;
};

}  // namespace bsdloc
