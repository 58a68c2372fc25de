#include "bsdloc/route_db.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <string>

namespace bsdloc {

namespace {

constexpr std::array<char, 8> kMagic = {'B', 'S', 'D', 'L', 'O', 'C', 'D', 'B'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
  std::array<unsigned char, sizeof(T)> b{};
  std::uint64_t u = 0;
  if constexpr (std::is_floating_point_v<T>) {
    static_assert(sizeof(T) == 8);
    std::memcpy(&u, &v, 8);
  } else {
    u = static_cast<std::uint64_t>(v);
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
  out.write(reinterpret_cast<const char*>(b.data()), sizeof(T));
}

template <typename T>
T get(std::istream& in, const char* what) {
  std::array<unsigned char, sizeof(T)> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), sizeof(T))) {
    throw DatabaseFormatError(std::string("route database: truncated while reading ") + what);
  }
  std::uint64_t u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  if constexpr (std::is_floating_point_v<T>) {
    T v;
    std::memcpy(&v, &u, 8);
    return v;
  } else {
    return static_cast<T>(u);
  }
}

void copy_bits(std::span<const Word> src, std::span<Word> dst) {
  std::copy(src.begin(), src.end(), dst.begin());
}

void set_bits(std::span<Word> row, std::size_t pos, std::uint64_t value, std::size_t count) {
  for (std::size_t k = 0; k < count; ++k) {
    if ((value >> k) & 1U) row[(pos + k) / 64] |= Word{1} << ((pos + k) % 64);
  }
}

void mask_tail(std::span<Word> row, std::size_t nbits) {
  if (nbits % 64 != 0 && !row.empty()) row[nbits / 64] &= (Word{1} << (nbits % 64)) - 1;
}

}  // namespace

std::span<Word> PackedRows::push_row() {
  data_.resize(data_.size() + stride_, 0);
  ++rows_;
  return {data_.data() + data_.size() - stride_, stride_};
}

BitString PackedRows::to_bit_string(std::size_t i) const {
  BitString s(bits_);
  auto r = row(i);
  std::copy(r.begin(), r.end(), s.words().begin());
  return s;
}

LengthStorage storage_for(std::size_t length, std::uint64_t route_count) {
  LengthStorage s;
  s.length = length;
  s.route_count = route_count;
  const std::uint64_t desc = bytes_for_bits(4 * length);
  const std::uint64_t turn = length == 0 ? 0 : bytes_for_bits(length - 1);
  const std::uint64_t ids = 4 * static_cast<std::uint64_t>(length);
  s.descriptor_bytes = desc * route_count;
  s.turn_bytes = turn * route_count;
  s.id_bytes = ids * route_count;
  s.record_bytes = desc + turn + ids;
  s.section_bytes = kDbSectionHeaderBytes + s.record_bytes * route_count;
  return s;
}

std::uint64_t database_file_bytes(std::span<const LengthStorage> sections) {
  std::uint64_t total = kDbHeaderBytes;
  for (const auto& s : sections) total += s.section_bytes;
  return total;
}

RouteDatabase::RouteDatabase(std::shared_ptr<const LocationGraph> graph, std::size_t max_length,
                             std::optional<std::size_t> per_length_limit)
    : graph_(std::move(graph)), limit_(per_length_limit) {
  if (!graph_) throw std::invalid_argument("RouteDatabase: null location graph");
  if (max_length == 0) throw std::invalid_argument("RouteDatabase: max_length must be >= 1");
  for (std::size_t i = 0; i < max_length; ++i) tables_.push_back(std::make_unique<Slot>());
}

const RouteTable& RouteDatabase::table(std::size_t length) const {
  if (length == 0 || length > tables_.size()) {
    throw std::out_of_range("route length " + std::to_string(length) + " outside 1.." +
                            std::to_string(tables_.size()));
  }
  Slot& slot = *tables_[length - 1];
  std::call_once(slot.once, [&] { build_table(length); });
  return *slot.table;
}

bool RouteDatabase::built(std::size_t length) const {
  return length >= 1 && length <= tables_.size() && tables_[length - 1]->table != nullptr;
}

std::size_t RouteDatabase::built_length() const {
  std::size_t l = 0;
  while (l < tables_.size() && built(l + 1)) ++l;
  return l;
}

void RouteDatabase::build_table(std::size_t length) const {
  const LocationGraph& g = *graph_;
  auto t = std::make_unique<RouteTable>();
  t->length = length;
  t->descriptors = PackedRows(4 * length);
  t->turns = PackedRows(length - 1);
  if (length == 1) {
    const std::size_t n = limit_ ? std::min(*limit_, g.size()) : g.size();
    t->truncated = n < g.size();
    for (std::uint32_t i = 0; i < n; ++i) {
      t->last.push_back(i);
      t->parent.push_back(0);
      t->descriptors.push_row()[0] = g.bsd[i].bits();
      t->turns.push_row();
    }
  } else {
    const RouteTable& prev = table(length - 1);
    t->truncated = prev.truncated;
    t->child_begin.reserve(prev.size() + 1);
    std::vector<LocationId> ids;
    std::vector<PlaceId> places;
    bool full = false;
    for (std::uint32_t p = 0; p < prev.size(); ++p) {
      t->child_begin.push_back(t->size());
      if (full) continue;
      route_into({static_cast<std::uint32_t>(length - 1), p}, ids);
      places.clear();
      for (auto id : ids) places.push_back(g.place[id]);
      const LocationId tail = ids.back();
      for (auto s : g.adjacency.successors(tail)) {
        if (std::find(places.begin(), places.end(), g.place[s]) != places.end()) continue;
        if (limit_ && t->size() == *limit_) {
          t->truncated = true;
          full = true;
          break;
        }
        t->parent.push_back(p);
        t->last.push_back(s);
        auto d = t->descriptors.push_row();
        copy_bits(prev.descriptors.row(p), d.first(prev.descriptors.stride()));
        set_bits(d, 4 * (length - 1), g.bsd[s].bits(), 4);
        auto tr = t->turns.push_row();
        copy_bits(prev.turns.row(p), tr.first(prev.turns.stride()));
        set_bits(tr, length - 2, turn_bit(g.heading[tail], g.heading[s], g.turn_threshold), 1);
      }
    }
    t->child_begin.push_back(t->size());
  }
  tables_[length - 1]->table = std::move(t);
}

void RouteDatabase::route_into(RouteRef r, std::vector<LocationId>& out) const {
  out.resize(r.length);
  std::uint32_t idx = r.index;
  for (std::size_t l = r.length; l >= 1; --l) {
    const RouteTable& t = table(l);
    out[l - 1] = t.last[idx];
    idx = t.parent[idx];
  }
}

std::vector<LocationId> RouteDatabase::route(RouteRef r) const {
  std::vector<LocationId> out;
  route_into(r, out);
  return out;
}

std::vector<PlaceId> RouteDatabase::route_places(RouteRef r) const {
  auto ids = route(r);
  for (auto& id : ids) id = graph_->place[id];
  return ids;
}

BitString RouteDatabase::descriptor(RouteRef r) const {
  return table(r.length).descriptors.to_bit_string(r.index);
}

BitString RouteDatabase::turns(RouteRef r) const {
  return table(r.length).turns.to_bit_string(r.index);
}

std::optional<std::uint32_t> RouteDatabase::find(std::span<const LocationId> route) const {
  if (route.empty() || route.size() > tables_.size()) return std::nullopt;
  const RouteTable& t1 = table(1);
  auto it = std::lower_bound(t1.last.begin(), t1.last.end(), route[0]);
  if (it == t1.last.end() || *it != route[0]) return std::nullopt;
  auto idx = static_cast<std::uint32_t>(it - t1.last.begin());
  for (std::size_t l = 2; l <= route.size(); ++l) {
    const RouteTable& t = table(l);
    if (idx + 1 >= t.child_begin.size()) return std::nullopt;
    auto b = t.last.begin() + static_cast<std::ptrdiff_t>(t.child_begin[idx]);
    auto e = t.last.begin() + static_cast<std::ptrdiff_t>(t.child_begin[idx + 1]);
    auto c = std::lower_bound(b, e, route[l - 1]);
    if (c == e || *c != route[l - 1]) return std::nullopt;
    idx = static_cast<std::uint32_t>(c - t.last.begin());
  }
  return idx;
}

LengthStorage RouteDatabase::storage(std::size_t length) const {
  return storage_for(length, table(length).size());
}

void RouteDatabase::save(std::ostream& out, std::optional<std::size_t> up_to) const {
  const std::size_t n = up_to ? *up_to : built_length();
  if (n > tables_.size()) throw std::out_of_range("save: length beyond max_length");
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, graph_->fingerprint);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tables_.size()));
  put<double>(out, graph_->turn_threshold);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(n));
  std::vector<LocationId> ids;
  std::vector<char> rec;
  for (std::size_t l = 1; l <= n; ++l) {
    const RouteTable& t = table(l);
    const LengthStorage st = storage_for(l, t.size());
    put<std::uint32_t>(out, static_cast<std::uint32_t>(l));
    put<std::uint64_t>(out, t.size());
    put<std::uint32_t>(out, static_cast<std::uint32_t>(st.record_bytes));
    put<std::uint32_t>(out, t.truncated ? 1U : 0U);
    const std::size_t db = bytes_for_bits(4 * l);
    const std::size_t tb = bytes_for_bits(l - 1);
    rec.resize(st.record_bytes);
    for (std::uint32_t i = 0; i < t.size(); ++i) {
      route_into({static_cast<std::uint32_t>(l), i}, ids);
      std::size_t o = 0;
      for (auto id : ids) {
        for (int k = 0; k < 4; ++k) rec[o++] = static_cast<char>((id >> (8 * k)) & 0xFF);
      }
      auto d = pack_bits_to_bytes(t.descriptors.row(i), 4 * l);
      std::memcpy(rec.data() + o, d.data(), db);
      o += db;
      if (tb > 0) {
        auto tt = pack_bits_to_bytes(t.turns.row(i), l - 1);
        std::memcpy(rec.data() + o, tt.data(), tb);
      }
      out.write(rec.data(), static_cast<std::streamsize>(rec.size()));
    }
  }
  if (!out) throw std::runtime_error("route database: write failed");
}

RouteDatabase RouteDatabase::load(std::istream& in, std::shared_ptr<const LocationGraph> graph,
                                  std::optional<std::size_t> max_length) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw DatabaseFormatError("route database: bad magic");
  }
  const auto version = get<std::uint32_t>(in, "version");
  if (version != kVersion) {
    throw DatabaseFormatError("route database: version mismatch: expected " +
                              std::to_string(kVersion) + ", found " + std::to_string(version));
  }
  const auto fp = get<std::uint64_t>(in, "map hash");
  if (!graph || fp != graph->fingerprint) {
    throw DatabaseFormatError("route database: map hash does not match the loaded map");
  }
  const auto stored_max = get<std::uint32_t>(in, "max length");
  const auto tau = get<double>(in, "turn threshold");
  if (tau != graph->turn_threshold) {
    throw DatabaseFormatError("route database: turn threshold differs from the location graph");
  }
  const auto sections = get<std::uint32_t>(in, "section count");
  const std::size_t cap = std::max<std::size_t>(
      {max_length.value_or(stored_max), static_cast<std::size_t>(sections), 1});
  RouteDatabase db(graph, cap);
  std::vector<LocationId> ids;
  std::vector<unsigned char> rec;
  for (std::uint32_t s = 1; s <= sections; ++s) {
    const auto l = get<std::uint32_t>(in, "section length");
    if (l != s) {
      throw DatabaseFormatError("route database: expected section for length " +
                                std::to_string(s) + ", found " + std::to_string(l));
    }
    const auto count = get<std::uint64_t>(in, "route count");
    const auto rb = get<std::uint32_t>(in, "record size");
    const auto flags = get<std::uint32_t>(in, "section flags");
    const LengthStorage st = storage_for(l, count);
    if (rb != st.record_bytes) {
      throw DatabaseFormatError("route database: record size " + std::to_string(rb) +
                                " does not match length " + std::to_string(l));
    }
    auto t = std::make_unique<RouteTable>();
    t->length = l;
    t->truncated = (flags & 1U) != 0;
    t->descriptors = PackedRows(4 * l);
    t->turns = PackedRows(l - 1);
    const RouteTable* prev = l > 1 ? db.tables_[l - 2]->table.get() : nullptr;
    if (prev) t->child_begin.assign(prev->size() + 1, 0);
    const std::size_t dbytes = bytes_for_bits(4 * l);
    const std::size_t tbytes = bytes_for_bits(l - 1);
    rec.resize(rb);
    ids.resize(l);
    std::int64_t last_parent = -1;
    for (std::uint64_t i = 0; i < count; ++i) {
      if (!in.read(reinterpret_cast<char*>(rec.data()), rb)) {
        throw DatabaseFormatError("route database: truncated record " + std::to_string(i) +
                                  " of length " + std::to_string(l));
      }
      for (std::size_t k = 0; k < l; ++k) {
        ids[k] = static_cast<LocationId>(rec[4 * k]) | (static_cast<LocationId>(rec[4 * k + 1]) << 8) |
                 (static_cast<LocationId>(rec[4 * k + 2]) << 16) |
                 (static_cast<LocationId>(rec[4 * k + 3]) << 24);
        if (ids[k] >= graph->size()) {
          throw DatabaseFormatError("route database: unknown location " + std::to_string(ids[k]));
        }
      }
      std::uint32_t parent = 0;
      if (prev) {
        auto p = db.find(std::span<const LocationId>(ids).first(l - 1));
        if (!p || static_cast<std::int64_t>(*p) < last_parent ||
            !graph->adjacency.adjacent(ids[l - 2], ids[l - 1])) {
          throw DatabaseFormatError("route database: record " + std::to_string(i) + " of length " +
                                    std::to_string(l) + " has no valid prefix");
        }
        parent = *p;
        last_parent = *p;
        ++t->child_begin[parent + 1];
      }
      t->parent.push_back(parent);
      t->last.push_back(ids[l - 1]);
      const std::size_t o = 4 * l;
      auto dr = t->descriptors.push_row();
      unpack_bytes_to_words({rec.data() + o, dbytes}, dr);
      mask_tail(dr, 4 * l);
      auto tr = t->turns.push_row();
      if (tbytes > 0) unpack_bytes_to_words({rec.data() + o + dbytes, tbytes}, tr);
      mask_tail(tr, l - 1);
    }
    if (prev) {
      for (std::size_t k = 1; k < t->child_begin.size(); ++k) t->child_begin[k] += t->child_begin[k - 1];
    }
    Slot& slot = *db.tables_[l - 1];
    std::call_once(slot.once, [&] { slot.table = std::move(t); });
  }
  return db;
}

}  // namespace bsdloc
