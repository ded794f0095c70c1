#include <algorithm>
#include <optional>

#include "cachecraft/errors.hpp"
#include "cachecraft/lp.hpp"

namespace cachecraft::lp {
namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

using SparseVec = std::vector<std::pair<std::size_t, Rational>>;

// Original variable x = offset + column[plus] - column[minus].
struct VarMap {
  Rational offset;
  std::size_t plus = kNone;
  std::size_t minus = kNone;
};

struct Row {
  SparseVec terms;  // over columns
  Relation relation;
  Rational rhs;
};

enum class Kind { Structural, Slack, Artificial };

class Simplex {
 public:
  Simplex(const Problem& problem, const SolveOptions& options) : problem_(problem), options_(options) {}

  Solution run();

 private:
  void standardize();
  void build_initial_basis();
  void compute_duals();
  Rational reduced_cost(std::size_t j) const;
  std::vector<Rational> column_in_basis(std::size_t j) const;
  void pivot(std::size_t r, std::size_t q, const std::vector<Rational>& alpha, const Rational& dq);
  void update_weights(std::size_t r, std::size_t q, const std::vector<Rational>& alpha);
  bool lex_less(std::size_t i, std::size_t r, const std::vector<Rational>& alpha) const;
  Status iterate();
  void drive_out_artificials();

  const Problem& problem_;
  SolveOptions options_;

  std::vector<VarMap> var_map_;
  std::vector<Row> rows_;
  std::size_t num_structural_ = 0;

  std::vector<SparseVec> cols_;
  std::vector<Kind> kind_;
  std::vector<Rational> b_;
  std::vector<Rational> structural_cost_;

  std::vector<std::size_t> basis_;
  std::vector<std::size_t> position_;  // row of a basic column, kNone otherwise
  std::vector<std::vector<Rational>> binv_;
  std::vector<Rational> xb_;
  std::vector<Rational> y_;
  std::vector<Rational> cost_;
  std::vector<std::size_t> lex_order_;
  bool lex_valid_ = false;
  std::vector<double> weight_;
  std::size_t pivots_ = 0;
};

void Simplex::standardize() {
  const auto& vars = problem_.variables();
  var_map_.resize(vars.size());
  std::vector<std::pair<std::size_t, Rational>> upper_candidates;
  for (VarId i = 0; i < vars.size(); ++i) {
    const Variable& v = vars[i];
    VarMap& map = var_map_[i];
    if (v.lower) {
      map.offset = *v.lower;
      map.plus = num_structural_++;
      if (v.upper) upper_candidates.emplace_back(map.plus, *v.upper - *v.lower);
    } else if (v.upper) {
      map.offset = *v.upper;
      map.minus = num_structural_++;
    } else {
      map.plus = num_structural_++;
      map.minus = num_structural_++;
    }
  }

  auto substitute = [&](const LinearExpr& terms, Rational& constant) {
    SparseVec out;
    out.reserve(terms.size());
    for (const Term& t : terms) {
      const VarMap& map = var_map_[t.var];
      if (!map.offset.is_zero()) constant += t.coef * map.offset;
      if (map.plus != kNone) out.emplace_back(map.plus, t.coef);
      if (map.minus != kNone) out.emplace_back(map.minus, -t.coef);
    }
    return out;
  };

  for (const Constraint& c : problem_.constraints()) {
    Rational constant;
    SparseVec terms = substitute(c.terms, constant);
    rows_.push_back(Row{std::move(terms), c.relation, c.rhs - constant});
  }

  // Upper bounds become rows unless a nonnegative row already caps the column.
  std::vector<std::vector<std::size_t>> rows_of(num_structural_);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    for (const auto& [col, coef] : rows_[r].terms) rows_of[col].push_back(r);
  }
  std::vector<char> row_nonneg(rows_.size(), 0);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const Row& row = rows_[r];
    bool ok = row.relation != Relation::GreaterEqual;
    for (const auto& term : row.terms) {
      if (term.second.sign() < 0) {
        ok = false;
        break;
      }
    }
    row_nonneg[r] = ok;
  }
  for (const auto& [col, bound] : upper_candidates) {
    bool implied = false;
    for (std::size_t r : rows_of[col]) {
      if (!row_nonneg[r]) continue;
      for (const auto& [c, coef] : rows_[r].terms) {
        if (c == col) {
          if (rows_[r].rhs / coef <= bound) implied = true;
          break;
        }
      }
      if (implied) break;
    }
    if (!implied) rows_.push_back(Row{SparseVec{{col, Rational(1)}}, Relation::LessEqual, bound});
  }

  for (Row& row : rows_) {
    bool flip = row.rhs.sign() < 0 || (row.rhs.is_zero() && row.relation == Relation::GreaterEqual);
    if (!flip) continue;
    row.rhs = -row.rhs;
    for (auto& term : row.terms) term.second = -term.second;
    if (row.relation == Relation::LessEqual) {
      row.relation = Relation::GreaterEqual;
    } else if (row.relation == Relation::GreaterEqual) {
      row.relation = Relation::LessEqual;
    }
  }

  Rational constant;
  SparseVec obj = substitute(problem_.objective(), constant);
  structural_cost_.assign(num_structural_, Rational());
  const bool maximize = problem_.sense() == Sense::Maximize;
  for (auto& [col, coef] : obj) structural_cost_[col] += maximize ? -coef : coef;
}

void Simplex::build_initial_basis() {
  const std::size_t m = rows_.size();

  // Zero-rhs equality rows may be covered by a structural column that touches no
  // other such row; the basis is then triangular and starts at a feasible point.
  std::vector<char> zero_eq(m, 0);
  std::vector<std::size_t> zero_eq_count(num_structural_, 0);
  for (std::size_t r = 0; r < m; ++r) {
    if (rows_[r].relation == Relation::Equal && rows_[r].rhs.is_zero()) {
      zero_eq[r] = 1;
      for (const auto& term : rows_[r].terms) ++zero_eq_count[term.first];
    }
  }
  basis_.assign(m, kNone);
  std::vector<char> crashed(m, 0);
  std::vector<char> used(num_structural_, 0);
  for (std::size_t r = 0; r < m; ++r) {
    if (!zero_eq[r]) continue;
    for (const auto& term : rows_[r].terms) {
      if (zero_eq_count[term.first] != 1 || used[term.first]) continue;
      basis_[r] = term.first;
      used[term.first] = 1;
      crashed[r] = 1;
      if (term.second.sign() < 0) {
        for (auto& t : rows_[r].terms) t.second = -t.second;
      }
      break;
    }
  }

  cols_.assign(num_structural_, SparseVec{});
  kind_.assign(num_structural_, Kind::Structural);
  b_.resize(m);
  for (std::size_t r = 0; r < m; ++r) {
    b_[r] = rows_[r].rhs;
    for (const auto& [col, coef] : rows_[r].terms) cols_[col].emplace_back(r, coef);
  }

  auto add_column = [&](SparseVec col, Kind kind) {
    cols_.push_back(std::move(col));
    kind_.push_back(kind);
    return cols_.size() - 1;
  };
  for (std::size_t r = 0; r < m; ++r) {
    switch (rows_[r].relation) {
      case Relation::LessEqual:
        basis_[r] = add_column(SparseVec{{r, Rational(1)}}, Kind::Slack);
        break;
      case Relation::GreaterEqual:
        add_column(SparseVec{{r, Rational(-1)}}, Kind::Slack);
        basis_[r] = add_column(SparseVec{{r, Rational(1)}}, Kind::Artificial);
        break;
      case Relation::Equal:
        if (basis_[r] == kNone) basis_[r] = add_column(SparseVec{{r, Rational(1)}}, Kind::Artificial);
        break;
    }
  }

  position_.assign(cols_.size(), kNone);
  for (std::size_t r = 0; r < m; ++r) position_[basis_[r]] = r;

  binv_.assign(m, std::vector<Rational>(m));
  for (std::size_t r = 0; r < m; ++r) binv_[r][r] = Rational(1);
  for (std::size_t r = 0; r < m; ++r) {
    if (!crashed[r]) continue;
    const std::size_t col = basis_[r];
    Rational d;
    for (const auto& [row, coef] : cols_[col]) {
      if (row == r) d = coef;
    }
    Rational inv = d.reciprocal();
    binv_[r][r] = inv;
    for (const auto& [row, coef] : cols_[col]) {
      if (row != r) binv_[row][r] = -coef * inv;
    }
  }
  xb_ = b_;  // crash columns sit at zero, unit columns carry the rhs
  for (std::size_t r = 0; r < m; ++r) {
    if (crashed[r]) xb_[r] = Rational();
  }

  // Every row of [x_B | B^-1] is lexicographically positive when the columns of
  // B^-1 belonging to crashed rows are compared last.
  lex_order_.clear();
  for (std::size_t r = 0; r < m; ++r) {
    if (!crashed[r]) lex_order_.push_back(r);
  }
  for (std::size_t r = 0; r < m; ++r) {
    if (crashed[r]) lex_order_.push_back(r);
  }
  lex_valid_ = true;
  weight_.assign(cols_.size(), 1.0);
}

void Simplex::compute_duals() {
  const std::size_t m = rows_.size();
  y_.assign(m, Rational());
  for (std::size_t i = 0; i < m; ++i) {
    const Rational& c = cost_[basis_[i]];
    if (c.is_zero()) continue;
    for (std::size_t k = 0; k < m; ++k) {
      if (!binv_[i][k].is_zero()) y_[k] += c * binv_[i][k];
    }
  }
}

Rational Simplex::reduced_cost(std::size_t j) const {
  Rational d = cost_[j];
  for (const auto& [row, coef] : cols_[j]) {
    if (!y_[row].is_zero()) d -= y_[row] * coef;
  }
  return d;
}

std::vector<Rational> Simplex::column_in_basis(std::size_t j) const {
  const std::size_t m = rows_.size();
  std::vector<Rational> alpha(m);
  for (const auto& [row, coef] : cols_[j]) {
    for (std::size_t i = 0; i < m; ++i) {
      const Rational& e = binv_[i][row];
      if (!e.is_zero()) alpha[i] += e * coef;
    }
  }
  return alpha;
}

void Simplex::pivot(std::size_t r, std::size_t q, const std::vector<Rational>& alpha, const Rational& dq) {
  const std::size_t m = rows_.size();
  std::vector<Rational>& prow = binv_[r];
  const Rational inv = alpha[r].reciprocal();
  std::vector<std::size_t> nz;
  for (std::size_t k = 0; k < m; ++k) {
    if (!prow[k].is_zero()) {
      prow[k] *= inv;
      nz.push_back(k);
    }
  }
  xb_[r] *= inv;
  for (std::size_t i = 0; i < m; ++i) {
    if (i == r || alpha[i].is_zero()) continue;
    const Rational& f = alpha[i];
    std::vector<Rational>& row = binv_[i];
    for (std::size_t k : nz) row[k] -= f * prow[k];
    if (!xb_[r].is_zero()) xb_[i] -= f * xb_[r];
  }
  if (!dq.is_zero()) {
    for (std::size_t k : nz) y_[k] += dq * prow[k];
  }
  position_[basis_[r]] = kNone;
  basis_[r] = q;
  position_[q] = r;
  ++pivots_;
}

// Devex reference weights: approximate steepest-edge norms, only used to rank candidates.
void Simplex::update_weights(std::size_t r, std::size_t q, const std::vector<Rational>& alpha) {
  const std::size_t m = rows_.size();
  std::vector<double> row(m);
  for (std::size_t k = 0; k < m; ++k) {
    if (!binv_[r][k].is_zero()) row[k] = binv_[r][k].to_double();
  }
  const double arq = alpha[r].to_double();
  const double wq = weight_[q];
  for (std::size_t j = 0; j < cols_.size(); ++j) {
    if (position_[j] != kNone || j == q || kind_[j] == Kind::Artificial) continue;
    double arj = 0;
    for (const auto& [i, coef] : cols_[j]) {
      if (row[i] != 0) arj += row[i] * coef.to_double();
    }
    if (arj == 0) continue;
    double ratio = arj / arq;
    weight_[j] = std::max(weight_[j], ratio * ratio * wq);
  }
  weight_[basis_[r]] = std::max(wq / (arq * arq), 1.0);
}

bool Simplex::lex_less(std::size_t i, std::size_t r, const std::vector<Rational>& alpha) const {
  // compares row i / alpha_i against row r / alpha_r, both alphas positive
  for (std::size_t c : lex_order_) {
    const Rational& ei = binv_[i][c];
    const Rational& er = binv_[r][c];
    if (ei.is_zero() && er.is_zero()) continue;
    Rational lhs = ei * alpha[r];
    Rational rhs = er * alpha[i];
    if (lhs != rhs) return lhs < rhs;
  }
  return false;
}

Status Simplex::iterate() {
  const std::size_t n = cols_.size();
  const std::size_t m = rows_.size();
  const bool pure_bland = options_.rule == PivotRule::Bland;
  bool smallest_index = pure_bland;
  while (true) {
    const bool lexicographic = !pure_bland && lex_valid_;
    std::size_t q = kNone;
    Rational best;
    double best_score = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (position_[j] != kNone || kind_[j] == Kind::Artificial) continue;
      Rational d = reduced_cost(j);
      if (d.sign() >= 0) continue;
      if (smallest_index) {
        q = j;
        best = d;
        break;
      }
      double dd = d.to_double();
      double score = dd * dd / weight_[j];
      if (q == kNone || score > best_score) {
        q = j;
        best = d;
        best_score = score;
      }
    }
    if (q == kNone) return Status::Optimal;

    std::vector<Rational> alpha = column_in_basis(q);
    std::size_t r = kNone;
    for (std::size_t i = 0; i < m; ++i) {
      if (alpha[i].sign() <= 0) continue;
      if (r == kNone) {
        r = i;
        continue;
      }
      // x_i / alpha_i versus x_r / alpha_r
      Rational lhs = xb_[i] * alpha[r];
      Rational rhs = xb_[r] * alpha[i];
      if (lhs < rhs) {
        r = i;
      } else if (lhs == rhs) {
        if (lexicographic ? lex_less(i, r, alpha) : basis_[i] < basis_[r]) r = i;
      }
    }
    if (r == kNone) return Status::Unbounded;
    const bool degenerate = xb_[r].is_zero();
    if (!smallest_index) update_weights(r, q, alpha);
    pivot(r, q, alpha, best);
    if (!pure_bland && !lexicographic) smallest_index = degenerate;
  }
}

void Simplex::drive_out_artificials() {
  const std::size_t m = rows_.size();
  for (std::size_t r = 0; r < m; ++r) {
    if (kind_[basis_[r]] != Kind::Artificial) continue;
    const std::vector<Rational>& row = binv_[r];
    for (std::size_t j = 0; j < cols_.size(); ++j) {
      if (position_[j] != kNone || kind_[j] == Kind::Artificial) continue;
      Rational t;
      for (const auto& [i, coef] : cols_[j]) {
        if (!row[i].is_zero()) t += row[i] * coef;
      }
      if (t.is_zero()) continue;
      pivot(r, j, column_in_basis(j), Rational());
      lex_valid_ = false;
      break;
    }
    // a row with no eligible column is redundant; its artificial stays basic at zero
  }
}

Solution Simplex::run() {
  standardize();
  build_initial_basis();
  Solution solution;

  bool has_artificial = false;
  for (std::size_t col : basis_) has_artificial = has_artificial || kind_[col] == Kind::Artificial;
  if (has_artificial) {
    cost_.assign(cols_.size(), Rational());
    for (std::size_t j = 0; j < cols_.size(); ++j) {
      if (kind_[j] == Kind::Artificial) cost_[j] = Rational(1);
    }
    compute_duals();
    iterate();
    Rational infeasibility;
    for (std::size_t r = 0; r < basis_.size(); ++r) {
      if (kind_[basis_[r]] == Kind::Artificial) infeasibility += xb_[r];
    }
    if (infeasibility.sign() > 0) {
      solution.status = Status::Infeasible;
      solution.pivots = pivots_;
      return solution;
    }
    drive_out_artificials();
  }

  cost_.assign(cols_.size(), Rational());
  for (std::size_t j = 0; j < num_structural_; ++j) cost_[j] = structural_cost_[j];
  compute_duals();
  Status status = iterate();
  solution.pivots = pivots_;
  if (status == Status::Unbounded) {
    solution.status = Status::Unbounded;
    return solution;
  }

  std::vector<Rational> col_value(num_structural_);
  for (std::size_t r = 0; r < basis_.size(); ++r) {
    if (basis_[r] < num_structural_) col_value[basis_[r]] = xb_[r];
  }
  solution.values.resize(var_map_.size());
  for (VarId i = 0; i < var_map_.size(); ++i) {
    const VarMap& map = var_map_[i];
    Rational x = map.offset;
    if (map.plus != kNone) x += col_value[map.plus];
    if (map.minus != kNone) x -= col_value[map.minus];
    solution.values[i] = std::move(x);
  }

  FeasibilityReport check = check_feasible(problem_, solution.values);
  if (!check.feasible()) {
    throw InternalError("simplex returned a point violating '" + check.violations.front().label + "'");
  }
  solution.status = Status::Optimal;
  solution.value = check.objective;
  for (const Constraint& c : problem_.constraints()) {
    Rational activity;
    for (const Term& t : c.terms) activity += t.coef * solution.values[t.var];
    if (activity == c.rhs) solution.tight_constraints.push_back(c.label);
  }
  return solution;
}

}  // namespace

Solution solve(const Problem& problem, const SolveOptions& options) {
  Simplex simplex(problem, options);
  return simplex.run();
}

}  // namespace cachecraft::lp
