#include "cachecraft/instance.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>
#include <string>

#include "cachecraft/errors.hpp"
#include "cachecraft/user_set.hpp"

namespace cachecraft {
namespace {

void collect_base(const CacheInstance& inst, bool check_memory, std::vector<std::string>& problems) {
  if (inst.K < 1 || inst.K > kMaxUsers) {
    problems.push_back("K=" + std::to_string(inst.K) + " outside [1," + std::to_string(kMaxUsers) + "]");
  }
  if (inst.N < inst.K) {
    problems.push_back("N=" + std::to_string(inst.N) + " < K=" + std::to_string(inst.K));
  }
  if (!check_memory) return;
  if (static_cast<int>(inst.m.size()) != inst.K) {
    problems.push_back("m has " + std::to_string(inst.m.size()) + " entries, expected K=" + std::to_string(inst.K));
  }
  for (std::size_t k = 0; k < inst.m.size(); ++k) {
    const Rational& v = inst.m[k];
    if (v.sign() < 0 || v > Rational(1)) {
      problems.push_back("m_" + std::to_string(k + 1) + "=" + v.str() + " outside [0,1]");
    }
  }
}

[[noreturn]] void raise(const std::vector<std::string>& problems) {
  std::string msg = "invalid instance:";
  for (const auto& p : problems) msg += "\n  " + p;
  throw ValidationError(msg);
}

}  // namespace

const CacheInstance& validate_instance(const CacheInstance& inst) {
  std::vector<std::string> problems;
  collect_base(inst, true, problems);
  if (!problems.empty()) raise(problems);
  return inst;
}

const CapacityInstance& validate_instance(const CapacityInstance& inst) {
  std::vector<std::string> problems;
  collect_base(inst.base, !inst.base.m.empty(), problems);
  if (static_cast<int>(inst.C.size()) != inst.base.K) {
    problems.push_back("C has " + std::to_string(inst.C.size()) + " entries, expected K=" +
                       std::to_string(inst.base.K));
  }
  for (std::size_t k = 0; k < inst.C.size(); ++k) {
    if (inst.C[k].sign() <= 0) problems.push_back("C_" + std::to_string(k + 1) + "=" + inst.C[k].str() + " is not positive");
  }
  if (inst.m_tot.sign() < 0) problems.push_back("m_tot=" + inst.m_tot.str() + " is negative");
  if (inst.m_tot > Rational(inst.base.K)) {
    problems.push_back("m_tot=" + inst.m_tot.str() + " exceeds K=" + std::to_string(inst.base.K));
  }
  if (!problems.empty()) raise(problems);
  return inst;
}

std::vector<std::size_t> ascending_order(const std::vector<Rational>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  return order;
}

void warn_if_large(int K) {
  if (K > soft_max_users()) {
    std::cerr << "warning: K=" << K << " exceeds " << soft_max_users()
              << "; constraint counts grow exponentially (set CACHECRAFT_MAX_K to silence)\n";
  }
}

}  // namespace cachecraft
