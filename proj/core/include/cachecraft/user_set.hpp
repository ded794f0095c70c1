#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

namespace cachecraft {

/// Hard upper limit on the number of users.
inline constexpr int kMaxUsers = 16;
/// Above this many users a warning is printed unless CACHECRAFT_MAX_K raises it.
inline constexpr int kDefaultSoftMaxUsers = 8;

/// A subset of users [K] = {1, ..., K} stored as a bitmask: bit k-1 is user k.
class UserSet {
 public:
  constexpr UserSet() = default;
  constexpr explicit UserSet(std::uint32_t mask) : mask_(mask) {}

  static UserSet single(int user) { return UserSet(1u << (user - 1)); }
  static UserSet full(int K) { return UserSet(K >= 32 ? ~0u : (1u << K) - 1); }
  static UserSet of(std::initializer_list<int> users);
  static UserSet of(const std::vector<int>& users);

  constexpr std::uint32_t mask() const { return mask_; }
  constexpr bool empty() const { return mask_ == 0; }
  int size() const { return std::popcount(mask_); }

  bool contains(int user) const { return (mask_ >> (user - 1)) & 1u; }
  bool contains(UserSet other) const { return (other.mask_ & ~mask_) == 0; }
  bool intersects(UserSet other) const { return (mask_ & other.mask_) != 0; }

  UserSet with(int user) const { return UserSet(mask_ | (1u << (user - 1))); }
  UserSet without(int user) const { return UserSet(mask_ & ~(1u << (user - 1))); }

  friend UserSet operator|(UserSet a, UserSet b) { return UserSet(a.mask_ | b.mask_); }
  friend UserSet operator&(UserSet a, UserSet b) { return UserSet(a.mask_ & b.mask_); }
  friend UserSet operator-(UserSet a, UserSet b) { return UserSet(a.mask_ & ~b.mask_); }
  friend constexpr bool operator==(UserSet, UserSet) = default;
  friend constexpr auto operator<=>(UserSet a, UserSet b) { return a.mask_ <=> b.mask_; }

  /// Members in ascending order, 1-based.
  std::vector<int> users() const;
  /// Smallest member; 0 for the empty set.
  int first() const { return mask_ == 0 ? 0 : std::countr_zero(mask_) + 1; }

  /// "[1,3]", or "[]" for the empty set.
  std::string str() const;
  /// Parses "[1,3]" (whitespace tolerated) for a K-user system.
  static UserSet parse(const std::string& text, int K);

 private:
  std::uint32_t mask_ = 0;
};

/// Throws ValidationError unless 1 <= K <= kMaxUsers.
void check_user_count(int K);

/// Soft threshold: CACHECRAFT_MAX_K if set and valid, else kDefaultSoftMaxUsers.
int soft_max_users();

/// All subsets of [K] accepted by `filter`, in ascending mask order.
std::vector<UserSet> enumerate_subsets(int K, const std::function<bool(UserSet)>& filter = {});

/// The family {S : T\{j} subset of S, j not in S}; 2^(K-|T|) sets in ascending mask order.
std::vector<UserSet> b_family(UserSet T, int j, int K);

}  // namespace cachecraft

template <>
struct std::hash<cachecraft::UserSet> {
  std::size_t operator()(cachecraft::UserSet s) const noexcept { return std::hash<std::uint32_t>{}(s.mask()); }
};
