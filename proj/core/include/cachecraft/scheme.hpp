#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cachecraft/instance.hpp"
#include "cachecraft/model.hpp"
#include "cachecraft/rational.hpp"
#include "cachecraft/user_set.hpp"

/// Packet-level realization of a scheme: files become P equal packets, subfiles become
/// packet intervals, signals become XORs of equal-length packet lists.
namespace cachecraft::scheme {

/// Largest packet count materialize() accepts.
inline constexpr std::int64_t kMaxPackets = 100'000'000;

/// Packets [begin, begin + length) of a file.
struct PacketRange {
  std::int64_t begin = 0;
  std::int64_t length = 0;
  std::int64_t end() const { return begin + length; }
  friend bool operator==(const PacketRange&, const PacketRange&) = default;
};

/// Part of a piece drawn from subfile S.
struct Segment {
  UserSet S;
  PacketRange range;
};

/// What a signal carries for one of its users: packets of that user's requested file,
/// listed segment by segment.
struct Piece {
  int user = 0;
  int file = 0;
  std::vector<Segment> segments;
  std::int64_t length() const;
};

struct Signal {
  UserSet T;
  std::int64_t length = 0;
  std::vector<Piece> pieces;  // ascending user
};

struct CacheEntry {
  int file = 0;
  UserSet S;
  PacketRange range;
};

struct MaterializedScheme {
  int K = 0;
  int N = 0;
  std::int64_t P = 0;
  std::vector<int> demand;               // demand[k-1] is the file (1-based) user k requests
  std::vector<PacketRange> layout;       // by subset mask; identical in every file
  std::vector<std::vector<CacheEntry>> cache;  // cache[k-1] lists Z_k
  std::vector<Signal> signals;           // transmission order
  /// Unicast packets the abstract plan allowed but that were not needed, per user.
  std::vector<std::int64_t> slack;
  model::Scheme abstract;

  std::int64_t cached_packets(int user) const;
  std::int64_t transmitted_packets() const;
};

/// Distinct demand d_k = k.
std::vector<int> default_demand(int K);

/// Least common multiple of every denominator in the scheme.
/// Throws ResourceLimitError above kMaxPackets.
std::int64_t packet_count(const model::Scheme& scheme);

/// Lays out subfiles, fills caches and carves signals. Multicast pieces come from a cursor
/// per (file, S), visited by descending |T| then ascending mask; unicast signals send their
/// structured pieces first, then any still-missing packets, and stop once the file is
/// complete. Throws ArgumentError for a bad demand and InternalError when the scheme
/// overdraws a subfile or breaks the equal-length rule.
MaterializedScheme materialize(const model::Scheme& scheme, const CacheInstance& inst,
                               const std::vector<int>& demand);
MaterializedScheme materialize(const model::Scheme& scheme, const CacheInstance& inst);

struct UserReport {
  int user = 0;
  int file = 0;
  std::int64_t recovered = 0;  // packets of the requested file held after decoding
  std::vector<PacketRange> missing;
  std::vector<std::string> failures;
  bool pass = false;
};

struct SimulationReport {
  std::vector<UserReport> users;
  std::int64_t packets_transmitted = 0;
  Rational load;
  bool passed() const;
};

/// Builds pseudo-random packet contents, XORs every signal, and has each user cancel the
/// other pieces using only its own cache. Structural and coverage failures are reported
/// per user rather than thrown.
SimulationReport simulate_and_decode(const MaterializedScheme& ms, std::uint64_t seed = 0x5eed);

struct Measurement {
  Rational load;
  std::optional<Rational> dct;
  /// abstract value minus measured value; nonzero only when unicast slack was skipped.
  Rational load_slack;
};

/// Load (and completion time) recomputed from signal lengths. Throws InternalError if the
/// packets exceed the abstract scheme's values.
Measurement measure(const MaterializedScheme& ms, const std::optional<std::vector<Rational>>& C = std::nullopt);

}  // namespace cachecraft::scheme
