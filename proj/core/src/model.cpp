#include "cachecraft/model.hpp"

#include "cachecraft/errors.hpp"

namespace cachecraft::model {
namespace {

constexpr lp::VarId kNoVar = static_cast<lp::VarId>(-1);

std::uint32_t subset_count(int K) { return std::uint32_t{1} << K; }

// The right-hand side of a u <= a_S style row: either a placement variable or a constant.
struct Cap {
  const PlacementVars* vars = nullptr;
  const PlacementVector* fixed = nullptr;
};

UserSet map_users(UserSet s, const std::vector<std::size_t>& perm) {
  std::uint32_t out = 0;
  for (int k : s.users()) out |= 1u << perm[static_cast<std::size_t>(k - 1)];
  return UserSet(out);
}

DeliveryVars build_delivery(int K, lp::Problem& into, Cap cap, Formulation formulation) {
  check_user_count(K);
  const bool compact = formulation == Formulation::Compact && cap.vars != nullptr;
  const std::uint32_t n = subset_count(K);
  DeliveryVars dv;
  dv.K = K;
  dv.formulation = compact ? Formulation::Compact : Formulation::Full;
  dv.v.assign(n, kNoVar);
  for (std::uint32_t t = 1; t < n; ++t) dv.v[t] = into.add_variable(signal_name(UserSet(t)));
  for (std::uint32_t t = 1; t < n; ++t) {
    UserSet T(t);
    if (compact && T.size() == 1) continue;
    for (int j : T.users()) {
      for (UserSet S : b_family(T, j, K)) {
        std::optional<Rational> upper;
        if (cap.fixed) upper = (*cap.fixed)[S];
        dv.u.emplace(PieceKey{T, S}, into.add_variable(piece_name(T, S), Rational(0), upper));
      }
    }
  }

  auto placement_term = [&](UserSet S, Rational coef, lp::LinearExpr& expr, Rational& rhs) {
    if (cap.vars) {
      expr.push_back({cap.vars->a[S.mask()], coef});
    } else {
      rhs -= coef * (*cap.fixed)[S];
    }
  };

  // multicast structure: every member of T receives a piece of length v_T
  for (std::uint32_t t = 1; t < n; ++t) {
    UserSet T(t);
    for (int j : T.users()) {
      lp::LinearExpr expr{{dv.v[t], 1}};
      Rational rhs;
      if (compact && T.size() == 1) {
        for (std::uint32_t s = 0; s < n; ++s) {
          if (!UserSet(s).contains(j)) placement_term(UserSet(s), -1, expr, rhs);
        }
        into.add_constraint(std::move(expr), lp::Relation::LessEqual, rhs, "unicast:" + T.str());
        continue;
      }
      for (UserSet S : b_family(T, j, K)) expr.push_back({dv.u.at(PieceKey{T, S}), -1});
      into.add_constraint(std::move(expr), lp::Relation::Equal, rhs, "struct:" + T.str() + ":" + std::to_string(j));
    }
  }

  // no bit of a subfile is sent twice toward the same user
  for (std::uint32_t s = 0; s < n; ++s) {
    UserSet S(s);
    if (S.size() < 2 || S.size() > K - 1) continue;
    for (int j = 1; j <= K; ++j) {
      if (S.contains(j)) continue;
      lp::LinearExpr expr;
      Rational rhs;
      std::uint32_t sub = 0;
      do {
        sub = (sub - s) & s;  // nonempty submasks of S, ascending
        expr.push_back({dv.u.at(PieceKey{UserSet(sub).with(j), S}), 1});
      } while (sub != s);
      placement_term(S, -1, expr, rhs);
      into.add_constraint(std::move(expr), lp::Relation::LessEqual, rhs, "red:" + S.str() + ":" + std::to_string(j));
    }
  }

  // every user completes its file
  for (int k = 1; k <= K; ++k) {
    lp::LinearExpr expr;
    Rational rhs(1);
    for (std::uint32_t t = 1; t < n; ++t) {
      if (UserSet(t).contains(k)) expr.push_back({dv.v[t], 1});
    }
    for (std::uint32_t s = 0; s < n; ++s) {
      if (UserSet(s).contains(k)) placement_term(UserSet(s), 1, expr, rhs);
    }
    into.add_constraint(std::move(expr), lp::Relation::GreaterEqual, rhs, "complete:" + std::to_string(k));
  }

  if (cap.vars) {
    for (const auto& [key, var] : dv.u) {
      const int size = key.S.size();
      const bool implied = key.T.size() >= 2 && size >= 2 && size <= K - 1;
      if (compact && implied) continue;
      into.add_constraint({{var, 1}, {cap.vars->a[key.S.mask()], -1}}, lp::Relation::LessEqual, 0,
                          "cap:" + key.T.str() + "|" + key.S.str());
    }
  }
  return dv;
}

PlacementVars place(int K, const std::vector<Rational>* m, const std::vector<lp::VarId>* memory, lp::Problem& into) {
  check_user_count(K);
  if (m && static_cast<int>(m->size()) != K) throw ArgumentError("memory vector length differs from K");
  if (memory && static_cast<int>(memory->size()) != K) throw ArgumentError("memory variable count differs from K");
  const std::uint32_t n = subset_count(K);
  PlacementVars pv;
  pv.K = K;
  pv.a.reserve(n);
  for (std::uint32_t s = 0; s < n; ++s) pv.a.push_back(into.add_variable(placement_name(UserSet(s)), Rational(0), Rational(1)));
  lp::LinearExpr norm;
  for (lp::VarId id : pv.a) norm.push_back({id, 1});
  into.add_constraint(std::move(norm), lp::Relation::Equal, 1, "norm");
  for (int k = 1; k <= K; ++k) {
    lp::LinearExpr expr;
    for (std::uint32_t s = 0; s < n; ++s) {
      if (UserSet(s).contains(k)) expr.push_back({pv.a[s], 1});
    }
    Rational rhs;
    if (m) {
      rhs = (*m)[static_cast<std::size_t>(k - 1)];
    } else {
      expr.push_back({(*memory)[static_cast<std::size_t>(k - 1)], -1});
    }
    into.add_constraint(std::move(expr), lp::Relation::LessEqual, rhs, "mem:" + std::to_string(k));
  }
  return pv;
}

}  // namespace

PlacementVector PlacementVector::zero(int K) {
  check_user_count(K);
  return PlacementVector{K, std::vector<Rational>(subset_count(K))};
}

DeliveryPlan DeliveryPlan::zero(int K) {
  check_user_count(K);
  return DeliveryPlan{K, std::vector<Rational>(subset_count(K)), {}};
}

Rational DeliveryPlan::piece(UserSet T, UserSet S) const {
  auto it = u.find(PieceKey{T, S});
  return it == u.end() ? Rational() : it->second;
}

void DeliveryPlan::set_piece(UserSet T, UserSet S, const Rational& value) {
  if (value.is_zero()) {
    u.erase(PieceKey{T, S});
  } else {
    u[PieceKey{T, S}] = value;
  }
}

Rational Scheme::load() const {
  Rational total;
  for (const Rational& x : delivery.v) total += x;
  return total;
}

Rational Scheme::completion_time(const std::vector<Rational>& C) const {
  if (static_cast<int>(C.size()) != K()) throw ArgumentError("capacity vector length differs from K");
  Rational total;
  for (std::uint32_t t = 1; t < delivery.v.size(); ++t) {
    if (delivery.v[t].is_zero()) continue;
    const Rational* rate = nullptr;
    for (int j : UserSet(t).users()) {
      const Rational& c = C[static_cast<std::size_t>(j - 1)];
      if (!rate || c < *rate) rate = &c;
    }
    total += delivery.v[t] / *rate;
  }
  return total;
}

Scheme Scheme::relabel(const std::vector<std::size_t>& perm) const {
  Scheme out{PlacementVector::zero(K()), DeliveryPlan::zero(K())};
  for (std::uint32_t s = 0; s < placement.a.size(); ++s) out.placement.a[map_users(UserSet(s), perm).mask()] = placement.a[s];
  for (std::uint32_t t = 1; t < delivery.v.size(); ++t) out.delivery.v[map_users(UserSet(t), perm).mask()] = delivery.v[t];
  for (const auto& [key, value] : delivery.u) {
    out.delivery.u.emplace(PieceKey{map_users(key.T, perm), map_users(key.S, perm)}, value);
  }
  return out;
}

std::string placement_name(UserSet S) { return "a" + S.str(); }
std::string signal_name(UserSet T) { return "v" + T.str(); }
std::string piece_name(UserSet T, UserSet S) {
  std::string t = T.str();
  std::string s = S.str();
  return "u[" + t.substr(1, t.size() - 2) + "|" + s.substr(1, s.size() - 2) + "]";
}

PlacementVars build_placement_rows(const CacheInstance& inst, lp::Problem& into) {
  return place(inst.K, &inst.m, nullptr, into);
}

PlacementVars build_placement_rows(int K, const std::vector<lp::VarId>& memory, lp::Problem& into) {
  return place(K, nullptr, &memory, into);
}

DeliveryVars build_delivery_rows(int K, lp::Problem& into, const PlacementVars& placement, Formulation formulation) {
  return build_delivery(K, into, Cap{&placement, nullptr}, formulation);
}

DeliveryVars build_delivery_rows(int K, lp::Problem& into, const PlacementVector& placement) {
  if (placement.K != K) throw ArgumentError("placement vector is for a different K");
  return build_delivery(K, into, Cap{nullptr, &placement}, Formulation::Full);
}

SchemeModel build_scheme_model(const CacheInstance& inst, Formulation formulation) {
  SchemeModel model;
  model.placement = build_placement_rows(inst, model.problem);
  model.delivery = build_delivery_rows(inst.K, model.problem, model.placement, formulation);
  lp::LinearExpr objective;
  for (std::uint32_t t = 1; t < model.delivery.v.size(); ++t) objective.push_back({model.delivery.v[t], 1});
  model.problem.set_objective(lp::Sense::Minimize, std::move(objective));
  return model;
}

void write_assignment(const Scheme& scheme, const PlacementVars& pv, const DeliveryVars& dv,
                      std::vector<Rational>& values) {
  if (scheme.K() != pv.K || scheme.K() != dv.K || scheme.delivery.K != pv.K) {
    throw ArgumentError("scheme and model disagree on K");
  }
  for (std::uint32_t s = 0; s < pv.a.size(); ++s) values.at(pv.a[s]) = scheme.placement.a[s];
  for (std::uint32_t t = 1; t < dv.v.size(); ++t) values.at(dv.v[t]) = scheme.delivery.v[t];
  for (const auto& [key, var] : dv.u) values.at(var) = scheme.delivery.piece(key.T, key.S);
}

Scheme read_scheme(const PlacementVars& pv, const DeliveryVars& dv, const std::vector<Rational>& values) {
  Scheme scheme{PlacementVector::zero(pv.K), DeliveryPlan::zero(dv.K)};
  for (std::uint32_t s = 0; s < pv.a.size(); ++s) scheme.placement.a[s] = values.at(pv.a[s]);
  for (std::uint32_t t = 1; t < dv.v.size(); ++t) scheme.delivery.v[t] = values.at(dv.v[t]);
  for (const auto& [key, var] : dv.u) scheme.delivery.set_piece(key.T, key.S, values.at(var));
  if (dv.formulation == Formulation::Compact) fill_unicast_pieces(scheme.placement, scheme.delivery);
  return scheme;
}

void fill_unicast_pieces(const PlacementVector& a, DeliveryPlan& plan) {
  const int K = plan.K;
  for (int j = 1; j <= K; ++j) {
    UserSet T = UserSet::single(j);
    Rational remaining = plan[T];
    for (UserSet S : b_family(T, j, K)) remaining -= plan.piece(T, S);
    for (UserSet S : b_family(T, j, K)) {
      if (remaining.sign() <= 0) break;
      Rational current = plan.piece(T, S);
      Rational room = a[S] - current;
      if (room.sign() <= 0) continue;
      Rational take = min(room, remaining);
      plan.set_piece(T, S, current + take);
      remaining -= take;
    }
  }
}

lp::FeasibilityReport check_scheme(const CacheInstance& inst, const Scheme& scheme) {
  SchemeModel model = build_scheme_model(inst, Formulation::Full);
  std::vector<Rational> values(model.problem.num_variables());
  write_assignment(scheme, model.placement, model.delivery, values);
  lp::FeasibilityReport report = lp::check_feasible(model.problem, values);
  for (const auto& [key, value] : scheme.delivery.u) {
    if (!model.delivery.u.count(key) && !value.is_zero()) {
      report.violations.push_back(lp::Violation{"piece:" + key.T.str() + "|" + key.S.str(), lp::Relation::Equal, value,
                                                Rational(), value.abs()});
    }
  }
  return report;
}

std::vector<SideInfoViolation> check_side_information(const Scheme& scheme) {
  const int K = scheme.K();
  const std::uint32_t n = subset_count(K);
  std::vector<SideInfoViolation> out;
  for (std::uint32_t sp = 1; sp < n; ++sp) {
    UserSet Sp(sp);
    if (Sp.size() > K - 2) continue;
    for (int j = 1; j <= K; ++j) {
      if (Sp.contains(j)) continue;
      UserSet core = Sp.with(j);
      Rational demand;
      Rational available;
      for (std::uint32_t x = 0; x < n; ++x) {
        UserSet X(x);
        if (X.contains(core)) demand += scheme.delivery.v[x];
        if (X.contains(Sp) && !X.contains(j)) available += scheme.placement.a[x];
      }
      if (demand > available) out.push_back(SideInfoViolation{Sp, j, demand, available});
    }
  }
  return out;
}

}  // namespace cachecraft::model
