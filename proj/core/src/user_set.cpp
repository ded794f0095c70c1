#include "cachecraft/user_set.hpp"

#include <cctype>
#include <cstdlib>
#include <string>

#include "cachecraft/errors.hpp"

namespace cachecraft {

UserSet UserSet::of(std::initializer_list<int> users) { return of(std::vector<int>(users)); }

UserSet UserSet::of(const std::vector<int>& users) {
  std::uint32_t mask = 0;
  for (int u : users) {
    if (u < 1 || u > kMaxUsers) throw ArgumentError("user id " + std::to_string(u) + " out of range");
    mask |= 1u << (u - 1);
  }
  return UserSet(mask);
}

std::vector<int> UserSet::users() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (std::uint32_t m = mask_; m != 0; m &= m - 1) out.push_back(std::countr_zero(m) + 1);
  return out;
}

std::string UserSet::str() const {
  std::string s = "[";
  bool first_item = true;
  for (int u : users()) {
    if (!first_item) s += ',';
    s += std::to_string(u);
    first_item = false;
  }
  s += ']';
  return s;
}

UserSet UserSet::parse(const std::string& text, int K) {
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto fail = [&]() -> UserSet { throw ArgumentError("malformed user set '" + text + "'"); };
  skip();
  if (i >= text.size() || text[i] != '[') return fail();
  ++i;
  skip();
  std::uint32_t mask = 0;
  if (i < text.size() && text[i] == ']') {
    ++i;
  } else {
    while (true) {
      skip();
      std::size_t start = i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (start == i || i - start > 3) return fail();
      int u = std::stoi(text.substr(start, i - start));
      if (u < 1 || u > K) throw ArgumentError("user " + std::to_string(u) + " in '" + text + "' outside [1," + std::to_string(K) + "]");
      mask |= 1u << (u - 1);
      skip();
      if (i < text.size() && text[i] == ',') {
        ++i;
        continue;
      }
      if (i < text.size() && text[i] == ']') {
        ++i;
        break;
      }
      return fail();
    }
  }
  skip();
  if (i != text.size()) return fail();
  return UserSet(mask);
}

void check_user_count(int K) {
  if (K < 1 || K > kMaxUsers) {
    throw ValidationError("user count K=" + std::to_string(K) + " outside [1," + std::to_string(kMaxUsers) + "]");
  }
}

int soft_max_users() {
  if (const char* env = std::getenv("CACHECRAFT_MAX_K")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= kMaxUsers) return static_cast<int>(v);
  }
  return kDefaultSoftMaxUsers;
}

std::vector<UserSet> enumerate_subsets(int K, const std::function<bool(UserSet)>& filter) {
  check_user_count(K);
  std::vector<UserSet> out;
  const std::uint32_t limit = 1u << K;
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    UserSet s(mask);
    if (!filter || filter(s)) out.push_back(s);
  }
  return out;
}

std::vector<UserSet> b_family(UserSet T, int j, int K) {
  check_user_count(K);
  if (T.empty()) throw ArgumentError("b_family needs a nonempty T");
  if (j < 1 || j > K || !T.contains(j)) {
    throw ArgumentError("user " + std::to_string(j) + " is not a member of " + T.str());
  }
  const UserSet base = T.without(j);
  const std::uint32_t free = UserSet::full(K).mask() & ~T.mask();
  std::vector<UserSet> out;
  out.reserve(std::size_t{1} << std::popcount(free));
  // ascending enumeration of submasks of `free`
  std::uint32_t sub = 0;
  while (true) {
    out.push_back(base | UserSet(sub));
    if (sub == free) break;
    sub = (sub - free) & free;
  }
  return out;
}

}  // namespace cachecraft
