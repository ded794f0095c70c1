#include "cachecraft/scheme.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "cachecraft/errors.hpp"

namespace cachecraft::scheme {
namespace {

std::string range_text(const PacketRange& r) {
  return std::to_string(r.begin) + "-" + std::to_string(r.end() - 1);
}

std::int64_t packets_of(const Rational& x, std::int64_t P, const std::string& what) {
  Rational scaled = x * Rational(P);
  if (!scaled.is_integer() || !scaled.is_small()) throw InternalError(what + " is not a whole number of packets");
  return scaled.small_numerator();
}

void append(std::vector<Segment>& segments, UserSet S, std::int64_t packet) {
  if (!segments.empty() && segments.back().S == S && segments.back().range.end() == packet) {
    ++segments.back().range.length;
  } else {
    segments.push_back(Segment{S, PacketRange{packet, 1}});
  }
}

std::vector<UserSet> transmission_order(int K) {
  std::vector<UserSet> order;
  for (std::uint32_t t = 1; t < (std::uint32_t{1} << K); ++t) order.emplace_back(t);
  std::stable_sort(order.begin(), order.end(), [](UserSet x, UserSet y) { return x.size() > y.size(); });
  return order;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t content(std::uint64_t seed, int file, std::int64_t packet) {
  return splitmix64(seed ^ splitmix64((static_cast<std::uint64_t>(file) << 40) ^ static_cast<std::uint64_t>(packet)));
}

std::vector<std::int64_t> flatten(const Piece& piece) {
  std::vector<std::int64_t> out;
  for (const Segment& s : piece.segments) {
    for (std::int64_t p = s.range.begin; p < s.range.end(); ++p) out.push_back(p);
  }
  return out;
}

// Merged packet intervals of one user's cache, per file.
class CacheIndex {
 public:
  CacheIndex(const std::vector<CacheEntry>& entries, int N) : by_file_(N + 1) {
    for (const CacheEntry& e : entries) {
      if (e.file >= 1 && e.file <= N && e.range.length > 0) by_file_[e.file].push_back(e.range);
    }
    for (auto& list : by_file_) {
      std::sort(list.begin(), list.end(), [](const PacketRange& a, const PacketRange& b) { return a.begin < b.begin; });
      std::vector<PacketRange> merged;
      for (const PacketRange& r : list) {
        if (!merged.empty() && merged.back().end() >= r.begin) {
          merged.back().length = std::max(merged.back().end(), r.end()) - merged.back().begin;
        } else {
          merged.push_back(r);
        }
      }
      list = std::move(merged);
    }
  }

  bool holds(int file, const PacketRange& r) const {
    if (file < 1 || file >= static_cast<int>(by_file_.size())) return false;
    const auto& list = by_file_[file];
    auto it = std::upper_bound(list.begin(), list.end(), r.begin,
                               [](std::int64_t x, const PacketRange& iv) { return x < iv.begin; });
    if (it == list.begin()) return r.length == 0;
    --it;
    return r.begin >= it->begin && r.end() <= it->end();
  }

  const std::vector<PacketRange>& file(int f) const { return by_file_.at(f); }

 private:
  std::vector<std::vector<PacketRange>> by_file_;
};

}  // namespace

std::int64_t Piece::length() const {
  std::int64_t total = 0;
  for (const Segment& s : segments) total += s.range.length;
  return total;
}

std::int64_t MaterializedScheme::cached_packets(int user) const {
  std::int64_t total = 0;
  for (const CacheEntry& e : cache.at(user - 1)) total += e.range.length;
  return total;
}

std::int64_t MaterializedScheme::transmitted_packets() const {
  std::int64_t total = 0;
  for (const Signal& s : signals) total += s.length;
  return total;
}

std::vector<int> default_demand(int K) {
  std::vector<int> d(K);
  for (int k = 0; k < K; ++k) d[k] = k + 1;
  return d;
}

std::int64_t packet_count(const model::Scheme& scheme) {
  mpz_class lcm = 1;
  auto include = [&](const Rational& x) { mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), x.denominator().get_mpz_t()); };
  for (const Rational& x : scheme.placement.a) include(x);
  for (const Rational& x : scheme.delivery.v) include(x);
  for (const auto& [key, x] : scheme.delivery.u) include(x);
  if (lcm > kMaxPackets) {
    throw ResourceLimitError("scheme needs " + lcm.get_str() + " packets per file, above the limit of " +
                             std::to_string(kMaxPackets));
  }
  return lcm.get_si();
}

MaterializedScheme materialize(const model::Scheme& scheme, const CacheInstance& inst) {
  return materialize(scheme, inst, default_demand(inst.K));
}

MaterializedScheme materialize(const model::Scheme& scheme, const CacheInstance& inst, const std::vector<int>& demand) {
  validate_instance(inst);
  const int K = inst.K;
  if (scheme.K() != K) {
    throw ArgumentError("scheme has K=" + std::to_string(scheme.K()) + " but the instance has K=" + std::to_string(K));
  }
  if (static_cast<int>(demand.size()) != K) throw ArgumentError("demand must list one file per user");
  std::set<int> seen;
  for (int d : demand) {
    if (d < 1 || d > inst.N) throw ArgumentError("demanded file " + std::to_string(d) + " outside [1, N]");
    if (!seen.insert(d).second) throw ArgumentError("demands must be distinct; file " + std::to_string(d) + " repeats");
  }

  MaterializedScheme ms;
  ms.K = K;
  ms.N = inst.N;
  ms.P = packet_count(scheme);
  ms.demand = demand;
  ms.abstract = scheme;
  const std::int64_t P = ms.P;

  std::int64_t position = 0;
  for (std::uint32_t s = 0; s < scheme.placement.a.size(); ++s) {
    std::int64_t length = packets_of(scheme.placement.a[s], P, "a" + UserSet(s).str());
    ms.layout.push_back(PacketRange{position, length});
    position += length;
  }
  if (position != P) throw ArgumentError("placement covers " + std::to_string(position) + " of " + std::to_string(P) + " packets");

  ms.cache.resize(K);
  for (int k = 1; k <= K; ++k) {
    for (int f = 1; f <= inst.N; ++f) {
      for (std::uint32_t s = 0; s < ms.layout.size(); ++s) {
        if (UserSet(s).contains(k) && ms.layout[s].length > 0) ms.cache[k - 1].push_back(CacheEntry{f, UserSet(s), ms.layout[s]});
      }
    }
    if (Rational(ms.cached_packets(k)) > inst.m[k - 1] * Rational(inst.N) * Rational(P)) {
      throw ArgumentError("placement exceeds the memory of user " + std::to_string(k));
    }
  }

  // have[j-1][p]: user j holds packet p of its requested file (cached or already delivered).
  std::vector<std::vector<bool>> have(K, std::vector<bool>(P, false));
  for (int j = 1; j <= K; ++j) {
    for (std::uint32_t s = 0; s < ms.layout.size(); ++s) {
      if (!UserSet(s).contains(j)) continue;
      for (std::int64_t p = ms.layout[s].begin; p < ms.layout[s].end(); ++p) have[j - 1][p] = true;
    }
  }

  std::map<std::pair<int, std::uint32_t>, std::int64_t> cursor;
  ms.slack.assign(K, 0);
  for (UserSet T : transmission_order(K)) {
    const std::int64_t length = packets_of(scheme.delivery[T], P, "v" + T.str());
    if (length == 0) continue;
    Signal signal{T, length, {}};
    if (T.size() >= 2) {
      for (int j : T.users()) {
        Piece piece{j, demand[j - 1], {}};
        for (UserSet S : b_family(T, j, K)) {
          std::int64_t take = packets_of(scheme.delivery.piece(T, S), P, "u" + T.str() + "|" + S.str());
          if (take == 0) continue;
          std::int64_t& used = cursor[{piece.file, S.mask()}];
          if (used + take > ms.layout[S.mask()].length) {
            throw InternalError("signal " + T.str() + " overdraws subfile " + S.str() + " of file " +
                                std::to_string(piece.file));
          }
          PacketRange r{ms.layout[S.mask()].begin + used, take};
          used += take;
          piece.segments.push_back(Segment{S, r});
          for (std::int64_t p = r.begin; p < r.end(); ++p) have[j - 1][p] = true;
        }
        if (piece.length() != length) {
          throw InternalError("piece for user " + std::to_string(j) + " in signal " + T.str() + " has " +
                              std::to_string(piece.length()) + " packets, expected " + std::to_string(length));
        }
        signal.pieces.push_back(std::move(piece));
      }
    } else {
      const int j = T.first();
      Piece piece{j, demand[j - 1], {}};
      std::int64_t budget = length;
      auto send = [&](UserSet S, std::int64_t limit) {
        const PacketRange& r = ms.layout[S.mask()];
        for (std::int64_t p = r.begin; p < r.end() && limit > 0 && budget > 0; ++p) {
          if (have[j - 1][p]) continue;
          have[j - 1][p] = true;
          append(piece.segments, S, p);
          --limit;
          --budget;
        }
      };
      for (UserSet S : b_family(T, j, K)) {
        std::int64_t planned = packets_of(scheme.delivery.piece(T, S), P, "u" + T.str() + "|" + S.str());
        if (planned > 0) send(S, planned);
      }
      for (UserSet S : b_family(T, j, K)) send(S, budget);
      ms.slack[j - 1] = budget;
      signal.length = piece.length();
      if (signal.length == 0) continue;
      signal.pieces.push_back(std::move(piece));
    }
    ms.signals.push_back(std::move(signal));
  }
  return ms;
}

bool SimulationReport::passed() const {
  return std::all_of(users.begin(), users.end(), [](const UserReport& u) { return u.pass; });
}

SimulationReport simulate_and_decode(const MaterializedScheme& ms, std::uint64_t seed) {
  const int K = ms.K;
  SimulationReport report;
  std::vector<CacheIndex> caches;
  std::vector<std::vector<bool>> coverage(K, std::vector<bool>(ms.P, false));
  for (int k = 1; k <= K; ++k) {
    caches.emplace_back(ms.cache[k - 1], ms.N);
    report.users.push_back(UserReport{k, ms.demand[k - 1], 0, {}, {}, false});
    for (const PacketRange& r : caches.back().file(ms.demand[k - 1])) {
      for (std::int64_t p = r.begin; p < r.end() && p < ms.P; ++p) coverage[k - 1][p] = true;
    }
  }

  for (const Signal& signal : ms.signals) {
    std::vector<std::vector<std::int64_t>> packets;
    bool aligned = true;
    for (const Piece& piece : signal.pieces) {
      packets.push_back(flatten(piece));
      aligned = aligned && static_cast<std::int64_t>(packets.back().size()) == signal.length;
    }
    if (!aligned) {
      for (const Piece& piece : signal.pieces) {
        report.users[piece.user - 1].failures.push_back("signal " + signal.T.str() + ": pieces differ in length");
      }
      continue;
    }
    std::vector<std::uint64_t> payload(signal.length, 0);
    for (std::size_t i = 0; i < signal.pieces.size(); ++i) {
      for (std::int64_t t = 0; t < signal.length; ++t) payload[t] ^= content(seed, signal.pieces[i].file, packets[i][t]);
    }
    report.packets_transmitted += signal.length;

    for (std::size_t i = 0; i < signal.pieces.size(); ++i) {
      const Piece& mine = signal.pieces[i];
      const int k = mine.user;
      UserReport& user = report.users[k - 1];
      bool cancellable = true;
      for (std::size_t o = 0; o < signal.pieces.size(); ++o) {
        if (o == i) continue;
        for (const Segment& seg : signal.pieces[o].segments) {
          if (!caches[k - 1].holds(signal.pieces[o].file, seg.range)) {
            user.failures.push_back("signal " + signal.T.str() + ": user " + std::to_string(k) +
                                    " cannot cancel the piece for user " + std::to_string(signal.pieces[o].user) +
                                    " from subfile " + seg.S.str() + " (file " + std::to_string(signal.pieces[o].file) +
                                    ", packets " + range_text(seg.range) + ")");
            cancellable = false;
          }
        }
      }
      if (!cancellable) continue;
      for (std::int64_t t = 0; t < signal.length; ++t) {
        std::uint64_t value = payload[t];
        for (std::size_t o = 0; o < signal.pieces.size(); ++o) {
          if (o != i) value ^= content(seed, signal.pieces[o].file, packets[o][t]);
        }
        std::int64_t p = packets[i][t];
        if (mine.file != user.file || value != content(seed, user.file, p)) {
          user.failures.push_back("signal " + signal.T.str() + ": user " + std::to_string(k) + " decoded packet " +
                                  std::to_string(p) + " incorrectly");
          break;
        }
        coverage[k - 1][p] = true;
      }
    }
  }

  for (int k = 1; k <= K; ++k) {
    UserReport& user = report.users[k - 1];
    const auto& cov = coverage[k - 1];
    for (std::int64_t p = 0; p < ms.P; ++p) {
      if (cov[p]) {
        ++user.recovered;
      } else if (!user.missing.empty() && user.missing.back().end() == p) {
        ++user.missing.back().length;
      } else {
        user.missing.push_back(PacketRange{p, 1});
      }
    }
    for (const PacketRange& r : user.missing) {
      user.failures.push_back("user " + std::to_string(k) + " is missing packets " + range_text(r) + " of file " +
                              std::to_string(user.file));
    }
    user.pass = user.failures.empty();
  }
  report.load = Rational(report.packets_transmitted) / Rational(ms.P);
  return report;
}

Measurement measure(const MaterializedScheme& ms, const std::optional<std::vector<Rational>>& C) {
  Measurement out;
  const Rational P(ms.P);
  out.load = Rational(ms.transmitted_packets()) / P;
  Rational abstract = ms.abstract.load();
  if (out.load > abstract) {
    throw InternalError("transmitted load " + out.load.str() + " exceeds the scheme's load " + abstract.str());
  }
  out.load_slack = abstract - out.load;
  if (C) {
    if (static_cast<int>(C->size()) != ms.K) throw ArgumentError("capacity vector length differs from K");
    Rational dct;
    for (const Signal& s : ms.signals) {
      Rational rate;
      bool first = true;
      for (int k : s.T.users()) {
        if (first || (*C)[k - 1] < rate) rate = (*C)[k - 1];
        first = false;
      }
      dct += Rational(s.length) / (P * rate);
    }
    Rational expected = ms.abstract.completion_time(*C);
    if (dct > expected) {
      throw InternalError("transmitted completion time " + dct.str() + " exceeds the scheme's " + expected.str());
    }
    out.dct = dct;
  }
  return out;
}

}  // namespace cachecraft::scheme
