#include "cachecraft/formulas.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

#include "cachecraft/errors.hpp"

namespace cachecraft::formulas {
namespace {

using model::DeliveryPlan;
using model::PlacementVector;
using model::Scheme;

std::vector<Rational> sorted_copy(const std::vector<Rational>& values, const std::vector<std::size_t>& order) {
  std::vector<Rational> out;
  out.reserve(order.size());
  for (std::size_t i : order) out.push_back(values[i]);
  return out;
}

Rational sum(const std::vector<Rational>& values, std::size_t count) {
  Rational total;
  for (std::size_t i = 0; i < count; ++i) total += values[i];
  return total;
}

Rational sum(const std::vector<Rational>& values) { return sum(values, values.size()); }

void require_memory(const CacheInstance& inst) {
  validate_instance(inst);
  if (static_cast<int>(inst.m.size()) != inst.K) {
    throw ArgumentError("memory vector has " + std::to_string(inst.m.size()) + " entries, expected K=" +
                        std::to_string(inst.K));
  }
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

UserSet prefix(int i) { return UserSet((std::uint32_t{1} << i) - 1); }

// Scheme over sorted users: exclusive subfiles a_{j} = m_j, pairwise multicasts of size
// min(m_i, m_j), and unicast remainders.
Scheme pairwise_scheme(const std::vector<Rational>& m) {
  const int K = static_cast<int>(m.size());
  Scheme s{PlacementVector::zero(K), DeliveryPlan::zero(K)};
  s.placement[UserSet()] = 1 - sum(m);
  for (int j = 1; j <= K; ++j) s.placement[UserSet::single(j)] = m[j - 1];
  for (int i = 1; i <= K; ++i) {
    for (int j = i + 1; j <= K; ++j) {
      Rational shared = min(m[i - 1], m[j - 1]);
      UserSet T = UserSet::single(i) | UserSet::single(j);
      s.delivery[T] = shared;
      s.delivery.set_piece(T, UserSet::single(i), shared);
      s.delivery.set_piece(T, UserSet::single(j), shared);
    }
  }
  for (int j = 1; j <= K; ++j) {
    Rational v = 1 - m[j - 1];
    for (int i = 1; i <= K; ++i) {
      if (i != j) v -= min(m[i - 1], m[j - 1]);
    }
    s.delivery[UserSet::single(j)] = v;
  }
  model::fill_unicast_pieces(s.placement, s.delivery);
  return s;
}

// Maximum flow on a dense residual graph; capacities are exact.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t n) : cap_(n, std::vector<Rational>(n)) {}
  void add(std::size_t from, std::size_t to, const Rational& c) { cap_[from][to] += c; }
  const Rational& residual(std::size_t from, std::size_t to) const { return cap_[from][to]; }

  Rational run(std::size_t source, std::size_t sink) {
    const std::size_t n = cap_.size();
    Rational total;
    for (;;) {
      std::vector<std::size_t> parent(n, n);
      parent[source] = source;
      std::deque<std::size_t> queue{source};
      while (!queue.empty() && parent[sink] == n) {
        std::size_t x = queue.front();
        queue.pop_front();
        for (std::size_t y = 0; y < n; ++y) {
          if (parent[y] == n && cap_[x][y].sign() > 0) {
            parent[y] = x;
            queue.push_back(y);
          }
        }
      }
      if (parent[sink] == n) return total;
      Rational push = cap_[parent[sink]][sink];
      for (std::size_t y = sink; y != source; y = parent[y]) push = min(push, cap_[parent[y]][y]);
      for (std::size_t y = sink; y != source; y = parent[y]) {
        cap_[parent[y]][y] -= push;
        cap_[y][parent[y]] += push;
      }
      total += push;
    }
  }

 private:
  std::vector<std::vector<Rational>> cap_;
};

Region region_of(const Rational& m1, const Rational& m2, const Rational& m3) {
  Rational total = m1 + m2 + m3;
  if (total <= 1) return Region::I;
  bool middle = total >= 1 && total <= 2;
  if (middle && m3 < m2 + 3 * m1 - 1 && 2 * m2 + m3 < 2) return Region::II;
  if (middle && m3 >= m2 + 3 * m1 - 1 && m1 + m2 < 1) return Region::III;
  if (total >= 2 || (2 * m2 + m3 >= 2 && m1 + m2 >= 1)) return Region::IV;
  throw InternalError("three-user memory vector matches no region");
}

struct TableRow {
  // a and v by mask over users {1,2,3}; unlisted entries are zero.
  std::vector<std::pair<unsigned, Rational>> a;
  std::vector<std::pair<unsigned, Rational>> v;
};

// Placement and signal sizes of the optimal three-user scheme for regions II-IV.
TableRow three_user_row(Region region, const Rational& m1, const Rational& m2, const Rational& m3) {
  constexpr unsigned u1 = 1, u2 = 2, u3 = 4, u12 = 3, u13 = 5, u23 = 6, u123 = 7;
  const Rational third(1, 3);
  const Rational total = m1 + m2 + m3;
  switch (region) {
    case Region::II:
      return {{{u1, (2 + m2 - m3) * third - m1},
               {u2, (2 - 2 * m2 - m3) * third},
               {u3, (2 - 2 * m2 - m3) * third},
               {u12, m1 - (m3 + 1 - m2) * third},
               {u13, m1 - (2 * m2 + 1 - 2 * m3) * third},
               {u23, (4 * m2 + 2 * m3 - 1) * third - m1}},
              {{u12, (2 + 2 * m3 - 2 * m2) * third - m1},
               {u13, (2 + m2 - m3) * third - m1},
               {u23, (2 - 2 * m2 - m3) * third},
               {u123, m1 + (m2 - m3 - 1) * third}}};
    case Region::III:
      if (m1 <= third && m1 + m3 < 1) {
        return {{{u1, m1}, {u2, 1 - m1 - m3}, {u3, 1 - m1 - m2}, {u23, total - 1}},
                {{u1, 1 - 3 * m1}, {u2, m3 - m2}, {u12, m1}, {u13, m1}, {u23, 1 - m1 - m3}}};
      }
      if (m1 > third && m3 < 2 * m1) {
        return {{{u1, 1 - 2 * m1}, {u2, 2 * m1 - m3}, {u3, 1 - m1 - m2}, {u13, 3 * m1 - 1}, {u23, m2 + m3 - 2 * m1}},
                {{u2, 1 + m3 - 3 * m1 - m2}, {u12, m1}, {u13, 1 - 2 * m1}, {u23, 2 * m1 - m3}}};
      }
      return {{{u1, 1 - m3}, {u3, 1 - m1 - m2}, {u13, m1 + m3 - 1}, {u23, m2}},
              {{u1, m3 - 2 * m1}, {u2, 1 - m1 - m2}, {u12, m1}, {u13, 1 - m3}}};
    case Region::IV: {
      std::vector<std::pair<unsigned, Rational>> a;
      if (total >= 2) {
        a = {{u12, 1 - m3}, {u13, 1 - m2}, {u23, 1 - m1}, {u123, total - 2}};
      } else {
        a = {{u1, 2 - total}, {u12, m1 + m2 - 1}, {u13, m1 + m3 - 1}, {u23, 1 - m1}};
      }
      if (1 + m1 >= m2 + m3) return {a, {{u12, m3 - m1}, {u13, m2 - m1}, {u123, 1 + m1 - m2 - m3}}};
      return {a, {{u1, m2 + m3 - 1 - m1}, {u12, 1 - m2}, {u13, 1 - m3}}};
    }
    case Region::I:
      break;
  }
  throw InternalError("no table row for region I");
}

}  // namespace

std::string to_string(Region region) {
  switch (region) {
    case Region::I: return "I";
    case Region::II: return "II";
    case Region::III: return "III";
    case Region::IV: return "IV";
  }
  return "?";
}

Region three_user_region(const std::vector<Rational>& sorted_m) {
  if (sorted_m.size() != 3) throw ArgumentError("three-user region needs exactly 3 memory values");
  if (!std::is_sorted(sorted_m.begin(), sorted_m.end())) throw ArgumentError("memory values must be ascending");
  return region_of(sorted_m[0], sorted_m[1], sorted_m[2]);
}

Rational gamma_S(int K, const std::map<Ordering, Rational>& alpha, UserSet S) {
  check_user_count(K);
  Rational total;
  for (const auto& [q, weight] : alpha) {
    std::vector<int> seen(q);
    std::sort(seen.begin(), seen.end());
    std::vector<int> identity(K);
    std::iota(identity.begin(), identity.end(), 1);
    if (seen != identity) throw ArgumentError("alpha key is not a permutation of [K]");
    if (weight.sign() < 0) throw ArgumentError("alpha has a negative weight");
    total += weight;
  }
  if (total != 1) throw ArgumentError("alpha weights sum to " + total.str() + ", expected 1");
  if (S.empty()) return K;
  Rational gamma;
  const int limit = K - S.size();
  for (const auto& [q, weight] : alpha) {
    for (int j = 1; j <= limit; ++j) {
      bool before_clear = true;
      for (int i = 0; i < j; ++i) before_clear = before_clear && !S.contains(q[i]);
      if (before_clear && S.contains(q[j])) gamma += j * weight;
    }
  }
  return gamma;
}

Rational load_small_memory(const CacheInstance& inst) {
  require_memory(inst);
  std::vector<Rational> m = sorted_copy(inst.m, ascending_order(inst.m));
  if (sum(m) > 1) throw DomainError("small-memory formula requires sum m <= 1, got " + sum(m).str());
  Rational load = inst.K;
  for (int j = 1; j <= inst.K; ++j) load -= (inst.K - j + 1) * m[j - 1];
  return load;
}

Rational load_large_memory(const CacheInstance& inst) {
  require_memory(inst);
  Rational total = sum(inst.m);
  if (total < inst.K - 1) {
    throw DomainError("large-memory formula requires sum m >= K-1=" + std::to_string(inst.K - 1) + ", got " +
                      total.str());
  }
  return 1 - *std::min_element(inst.m.begin(), inst.m.end());
}

ThreeUserLoad load_three_user(const CacheInstance& inst) {
  if (inst.K != 3) throw ArgumentError("three-user formula requires K=3, got K=" + std::to_string(inst.K));
  require_memory(inst);
  std::vector<Rational> m = sorted_copy(inst.m, ascending_order(inst.m));
  const Rational& m1 = m[0];
  const Rational& m2 = m[1];
  const Rational& m3 = m[2];
  Rational weighted = 3 * m1 + 2 * m2 + m3;
  Rational load = max(max(3 - weighted, Rational(5, 3) - weighted / 3), max(2 - 2 * m1 - m2, 1 - m1));
  return {load, region_of(m1, m2, m3)};
}

Rational bound_amiri(const CacheInstance& inst) {
  require_memory(inst);
  std::vector<Rational> m = sorted_copy(inst.m, ascending_order(inst.m));
  const std::int64_t K = inst.K;
  const std::int64_t N = inst.N;
  Rational best;
  bool first = true;
  for (std::int64_t s = 1; s <= K; ++s) {
    for (std::int64_t l = 1; l <= ceil_div(N, s); ++l) {
      std::int64_t gamma = std::min(std::max<std::int64_t>(ceil_div(N, l) - s, 0), K - s);
      Rational served(N - std::max<std::int64_t>(N - K * l, 0), l);
      Rational cached = s * N * sum(m, static_cast<std::size_t>(s + gamma)) + gamma * std::max<std::int64_t>(N - l * s, 0);
      Rational value = served - cached / (l * (s + gamma));
      if (first || value > best) best = value;
      first = false;
    }
  }
  return best;
}

Rational bound_cutset(const CacheInstance& inst) {
  require_memory(inst);
  std::vector<Rational> m = sorted_copy(inst.m, ascending_order(inst.m));
  const int N = inst.N;
  const int limit = std::min(inst.K, N);
  Rational best;
  bool first = true;
  for (int s = 1; s <= limit; ++s) {
    Rational windowed = s;
    for (int k = 1; k <= s; ++k) windowed -= N * sum(m, k) / (N - k + 1);
    Rational plain = s * (1 - sum(m, s));
    Rational value = max(windowed, plain);
    if (first || value > best) best = value;
    first = false;
  }
  return best;
}

AllocationResult dct_closed_form(const CapacityInstance& inst) {
  validate_instance(inst);
  if (inst.m_tot > 1) {
    throw DomainError("closed-form allocation requires m_tot <= 1, got " + inst.m_tot.str() +
                      "; use the linear-program allocation instead");
  }
  const int K = inst.base.K;
  AllocationResult out;
  out.order = ascending_order(inst.C);
  std::vector<Rational> C = sorted_copy(inst.C, out.order);
  Rational base;
  for (const Rational& c : C) base += c.reciprocal();
  Rational best;
  Rational prefix_sum;
  for (int i = 1; i <= K; ++i) {
    prefix_sum += i * inst.m_tot / C[i - 1];
    Rational value = prefix_sum / i;
    if (out.maximizers.empty() || value > best) {
      best = value;
      out.maximizers = {i};
    } else if (value == best) {
      out.maximizers.push_back(i);
    }
  }
  out.q = out.maximizers.front();
  out.theta = base - best;
  out.m_star.assign(K, Rational());
  for (int i = 0; i < out.q; ++i) out.m_star[out.order[i]] = inst.m_tot / out.q;
  return out;
}

Rational dct_uniform(const CapacityInstance& inst) {
  validate_instance(inst);
  if (!inst.m_tot.is_integer()) {
    throw DomainError("uniform allocation formula requires an integer m_tot, got " + inst.m_tot.str());
  }
  const int K = inst.base.K;
  if (inst.m_tot > K) throw DomainError("uniform allocation formula requires m_tot <= K");
  const auto t = static_cast<int>(inst.m_tot.small_numerator());
  std::vector<Rational> C = sorted_copy(inst.C, ascending_order(inst.C));
  Rational total;
  for (int j = 1; j <= K - t; ++j) total += Rational(binomial(K - j, t)) / C[j - 1];
  return total / Rational(binomial(K, t));
}

Rational dct_uniform_shared(const CapacityInstance& inst) {
  validate_instance(inst);
  if (inst.m_tot > inst.base.K) throw DomainError("uniform allocation formula requires m_tot <= K");
  if (inst.m_tot.is_integer()) return dct_uniform(inst);
  mpz_class whole = inst.m_tot.numerator() / inst.m_tot.denominator();
  Rational low(whole.get_si());
  Rational frac = inst.m_tot - low;
  CapacityInstance below = inst, above = inst;
  below.m_tot = low;
  above.m_tot = low + 1;
  return (1 - frac) * dct_uniform(below) + frac * dct_uniform(above);
}

Rational pairwise_completion_time(const std::vector<Rational>& C, const std::vector<Rational>& m) {
  if (C.size() != m.size()) throw ArgumentError("capacity and memory vectors differ in length");
  Rational total;
  for (std::size_t k = 0; k < C.size(); ++k) total += (1 - m[k]) / C[k];
  for (std::size_t i = 0; i < C.size(); ++i) {
    for (std::size_t j = i + 1; j < C.size(); ++j) total -= min(m[i], m[j]) / max(C[i], C[j]);
  }
  return total;
}

Scheme build_scheme_small_memory(const CacheInstance& inst) {
  load_small_memory(inst);
  std::vector<std::size_t> order = ascending_order(inst.m);
  return pairwise_scheme(sorted_copy(inst.m, order)).relabel(order);
}

Scheme build_scheme_large_memory(const CacheInstance& inst) {
  load_large_memory(inst);
  const int K = inst.K;
  std::vector<std::size_t> order = ascending_order(inst.m);
  std::vector<Rational> m = sorted_copy(inst.m, order);
  const UserSet all = UserSet::full(K);
  Scheme s{PlacementVector::zero(K), DeliveryPlan::zero(K)};
  s.placement[all] = sum(m) - (K - 1);
  for (int i = 1; i <= K; ++i) s.placement[all.without(i)] = 1 - m[i - 1];

  // f(l) = (K-l-1) m_l - sum_{i>l} m_i + 1; delivery switches at the first l with f(l) < 0.
  auto f = [&](int l) {
    Rational value = (K - l - 1) * m[l - 1] + 1;
    for (int i = l + 1; i <= K; ++i) value -= m[i - 1];
    return value;
  };
  if (f(1).sign() >= 0) {
    for (int i = 2; i <= K; ++i) s.delivery[all.without(i)] = m[i - 1] - m[0];
    Rational full = 1 + (K - 2) * m[0];
    for (int k = 2; k <= K; ++k) full -= m[k - 1];
    s.delivery[all] = full;
  } else {
    int l = 1;
    while (!(f(l).sign() < 0 && f(l + 1).sign() >= 0)) ++l;
    for (int i = 1; i < l; ++i) s.delivery[prefix(i)] = m[i] - m[i - 1];
    s.delivery[prefix(l)] = -f(l) / (K - l - 1);
    Rational tail = sum(m) - sum(m, l);
    for (int i = l + 1; i <= K; ++i) s.delivery[all.without(i)] = ((K - l - 1) * m[i - 1] + 1 - tail) / (K - l - 1);
  }
  for (std::uint32_t t = 1; t < s.delivery.v.size(); ++t) {
    UserSet T(t);
    for (int k : T.users()) s.delivery.set_piece(T, all.without(k), s.delivery[T]);
  }
  return s.relabel(order);
}

Scheme build_scheme_three_user(const CacheInstance& inst) {
  ThreeUserLoad expected = load_three_user(inst);
  if (expected.region == Region::I) return build_scheme_small_memory(inst);
  std::vector<std::size_t> order = ascending_order(inst.m);
  std::vector<Rational> m = sorted_copy(inst.m, order);
  TableRow row = three_user_row(expected.region, m[0], m[1], m[2]);
  Scheme s{PlacementVector::zero(3), DeliveryPlan::zero(3)};
  Rational placed;
  for (const auto& [mask, value] : row.a) {
    s.placement.a[mask] = value;
    placed += value;
  }
  s.placement[UserSet()] = 1 - placed;
  for (const auto& [mask, value] : row.v) s.delivery.v[mask] = value;
  assign_pieces(s.placement, s.delivery);
  if (s.load() != expected.load) {
    throw InternalError("three-user scheme load " + s.load().str() + " differs from " + expected.load.str());
  }
  return s.relabel(order);
}

Scheme build_scheme_lemma1(const CapacityInstance& inst, const std::vector<Rational>& m) {
  validate_instance(inst);
  if (static_cast<int>(m.size()) != inst.base.K) throw ArgumentError("allocation length differs from K");
  for (const Rational& x : m) {
    if (x.sign() < 0 || x > 1) throw ArgumentError("allocation entry " + x.str() + " outside [0,1]");
  }
  if (sum(m) > 1) throw DomainError("pairwise-multicast scheme requires sum m <= 1, got " + sum(m).str());
  return pairwise_scheme(m);
}

void assign_pieces(const PlacementVector& a, DeliveryPlan& plan) {
  const int K = plan.K;
  for (int j = 1; j <= K; ++j) {
    // Nodes: 0 source, 1 sink, 2 + mask for signals T, 2 + 2^K + mask for subfiles S.
    const std::size_t signals = 2;
    const std::size_t subfiles = 2 + (std::size_t{1} << K);
    MaxFlow flow(2 + (std::size_t{2} << K));
    Rational demand;
    std::vector<UserSet> served;
    for (std::uint32_t t = 1; t < plan.v.size(); ++t) {
      UserSet T(t);
      if (T.size() < 2 || !T.contains(j) || plan[T].sign() <= 0) continue;
      served.push_back(T);
      demand += plan[T];
      flow.add(0, signals + t, plan[T]);
      for (UserSet S : b_family(T, j, K)) flow.add(signals + t, subfiles + S.mask(), plan[T]);
    }
    for (std::uint32_t s = 0; s < a.a.size(); ++s) {
      if (!UserSet(s).contains(j) && a.a[s].sign() > 0) flow.add(subfiles + s, 1, a.a[s]);
    }
    Rational carried = flow.run(0, 1);
    if (carried != demand) {
      throw InternalError("user " + std::to_string(j) + " side information carries " + carried.str() + " of " +
                          demand.str());
    }
    for (UserSet T : served) {
      for (UserSet S : b_family(T, j, K)) {
        plan.set_piece(T, S, flow.residual(subfiles + S.mask(), signals + T.mask()));
      }
    }
  }
  model::fill_unicast_pieces(a, plan);
}

}  // namespace cachecraft::formulas
