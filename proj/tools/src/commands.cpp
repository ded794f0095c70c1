#include "cachecraft_cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "cachecraft/errors.hpp"
#include "cachecraft/formulas.hpp"
#include "cachecraft/lp.hpp"
#include "cachecraft/scheme.hpp"
#include "cachecraft/solve.hpp"

namespace cachecraft::cli {
namespace {

constexpr std::size_t kMaxGridPoints = 100000;

// Stores "key": "p/q" and, when decimals are on, "key_decimal".
void put(Json& doc, const std::string& key, const Rational& value, const Options& options) {
  doc[key] = value.str();
  if (options.decimals > 0) doc[key + "_decimal"] = render_decimal(value, options.decimals);
}

std::string cell(const Rational& value, const Options& options) {
  return options.decimals > 0 ? render_decimal(value, options.decimals) : value.str();
}

Rational sum(const std::vector<Rational>& values) {
  Rational total;
  for (const Rational& v : values) total += v;
  return total;
}

Json range_text(const scheme::PacketRange& r) {
  return std::to_string(r.begin) + "-" + std::to_string(r.end() - 1);
}

void lower_bounds(const CacheInstance& inst, Json& doc, const Options& options) {
  put(doc, "uncoded_lb", solve::solve_uncoded_lower_bound(inst).value, options);
  put(doc, "amiri_lb", formulas::bound_amiri(inst), options);
  put(doc, "cutset_lb", formulas::bound_cutset(inst), options);
}

SweepMode parse_mode(const Json& value, const std::string& where) {
  if (value.is_string()) {
    const std::string mode = value.get<std::string>();
    if (mode == "load-vs-m1") return SweepMode::LoadVsM1;
    if (mode == "dct-vs-mtot") return SweepMode::DctVsMtot;
    if (mode == "alloc-vs-mtot") return SweepMode::AllocVsMtot;
  }
  throw ValidationError(where + ": mode must be one of load-vs-m1, dct-vs-mtot, alloc-vs-mtot");
}

// Memory vector for load-vs-m1 at m_1 = x.
std::vector<Rational> geometric_memory(int K, const Rational& x, const Rational& rho) {
  std::vector<Rational> m{x};
  for (int k = 1; k < K; ++k) m.push_back(m.back() / rho);
  return m;
}

std::vector<std::string> sweep_row(const SweepSpec& spec, const Rational& x, const Options& options) {
  std::vector<std::string> row{cell(x, options)};
  if (spec.mode == SweepMode::LoadVsM1) {
    CacheInstance inst{spec.K, spec.N, geometric_memory(spec.K, x, spec.rho)};
    row.push_back(cell(solve::solve_min_load(inst).load, options));
    row.push_back(cell(solve::solve_uncoded_lower_bound(inst).value, options));
    row.push_back(cell(formulas::bound_amiri(inst), options));
    row.push_back(cell(formulas::bound_cutset(inst), options));
    return row;
  }
  CapacityInstance inst{CacheInstance{spec.K, spec.N, {}}, spec.C, x};
  solve::DctSolution best = solve::solve_min_dct(inst);
  row.push_back(cell(best.dct, options));
  if (spec.mode == SweepMode::DctVsMtot) {
    row.push_back(cell(formulas::dct_uniform_shared(inst), options));
  } else {
    for (const Rational& m : best.m) row.push_back(cell(m, options));
  }
  return row;
}

}  // namespace

std::vector<Rational> SweepSpec::grid() const {
  std::vector<Rational> points;
  for (Rational x = start; x <= stop; x += step) {
    if (points.size() == kMaxGridPoints) {
      throw ValidationError("grid has more than " + std::to_string(kMaxGridPoints) + " points");
    }
    points.push_back(x);
  }
  return points;
}

SweepSpec parse_sweep_spec(const std::string& text, const std::string& name) {
  Json doc = parse_json(text, name);
  if (!doc.is_object()) throw ValidationError(name + ": expected a JSON object");
  auto need = [&](const char* key) -> const Json& {
    if (!doc.contains(key)) throw ValidationError(name + ": missing field \"" + std::string(key) + "\"");
    return doc[key];
  };
  SweepSpec spec;
  spec.mode = parse_mode(need("mode"), name);
  const Json& K = need("K");
  if (!K.is_number_integer()) throw ValidationError(name + ": K must be an integer");
  spec.K = K.get<int>();
  spec.N = spec.K;
  if (doc.contains("N")) {
    if (!doc["N"].is_number_integer()) throw ValidationError(name + ": N must be an integer");
    spec.N = doc["N"].get<int>();
  }
  validate_instance(CacheInstance{spec.K, spec.N, std::vector<Rational>(spec.K > 0 ? spec.K : 0)});

  const Json& grid = need("grid");
  if (!grid.is_object()) throw ValidationError(name + ": grid must be an object with start, stop and step");
  for (const char* key : {"start", "stop", "step"}) {
    if (!grid.contains(key)) throw ValidationError(name + ": grid is missing \"" + std::string(key) + "\"");
  }
  spec.start = to_rational(grid["start"], name + ": grid.start");
  spec.stop = to_rational(grid["stop"], name + ": grid.stop");
  spec.step = to_rational(grid["step"], name + ": grid.step");
  if (spec.step.sign() <= 0) throw ValidationError(name + ": grid.step must be positive");
  if (spec.start.sign() < 0) throw ValidationError(name + ": grid.start must be nonnegative");
  if (spec.stop < spec.start) throw ValidationError(name + ": grid is empty (stop < start)");

  if (spec.mode == SweepMode::LoadVsM1) {
    if (doc.contains("rho")) spec.rho = to_rational(doc["rho"], name + ": rho");
    if (spec.rho.sign() <= 0 || spec.rho > Rational(1)) throw ValidationError(name + ": rho must lie in (0,1]");
    Rational top = geometric_memory(spec.K, spec.stop, spec.rho).back();
    if (top > Rational(1)) {
      throw ValidationError(name + ": m_" + std::to_string(spec.K) + " = " + top.str() +
                            " exceeds 1 at the end of the grid");
    }
  } else {
    const Json& C = need("C");
    if (!C.is_array()) throw ValidationError(name + ": C must be an array");
    for (std::size_t i = 0; i < C.size(); ++i) spec.C.push_back(to_rational(C[i], name + ": C[" + std::to_string(i) + "]"));
    try {
      validate_instance(CapacityInstance{CacheInstance{spec.K, spec.N, {}}, spec.C, spec.stop});
    } catch (const ValidationError& e) {
      throw ValidationError(name + ": " + e.what());
    }
  }
  spec.grid();
  return spec;
}

Json cmd_load(const InstanceFile& file, const Options& options, std::ostream* lp_dump) {
  const CacheInstance& inst = file.cache;
  validate_instance(inst);
  warn_if_large(inst.K);
  solve::SolverOptions solver;
  if (lp_dump != nullptr) solver.inspect = [lp_dump](const lp::Problem& p) { *lp_dump << lp::dump(p); };
  solve::LoadSolution best = solve::solve_min_load(inst, solver);

  Json doc;
  doc["K"] = inst.K;
  doc["N"] = inst.N;
  doc["m"] = rational_list(inst.m);
  put(doc, "achievable", best.load, options);
  lower_bounds(inst, doc, options);

  Rational total = sum(inst.m);
  if (inst.K == 3) {
    formulas::ThreeUserLoad closed = formulas::load_three_user(inst);
    put(doc, "closed_form", closed.load, options);
    doc["region"] = formulas::to_string(closed.region);
  } else if (total <= Rational(1)) {
    put(doc, "closed_form", formulas::load_small_memory(inst), options);
    doc["closed_form_regime"] = "small-memory";
  } else if (total >= Rational(inst.K - 1)) {
    put(doc, "closed_form", formulas::load_large_memory(inst), options);
    doc["closed_form_regime"] = "large-memory";
  }
  doc["load"] = best.scheme.load().str();
  write_scheme(best.scheme, doc);
  return doc;
}

Json cmd_allocate(const InstanceFile& file, const Options& options) {
  CapacityInstance inst = file.capacity();
  validate_instance(inst);
  warn_if_large(inst.base.K);
  solve::DctSolution best = solve::solve_min_dct(inst);

  Json doc;
  doc["K"] = inst.base.K;
  doc["N"] = inst.base.N;
  doc["C"] = rational_list(inst.C);
  doc["m_tot"] = inst.m_tot.str();
  put(doc, "theta_star", best.dct, options);
  doc["m_star"] = rational_list(best.m);
  if (inst.m_tot <= Rational(1)) {
    formulas::AllocationResult closed = formulas::dct_closed_form(inst);
    put(doc, "theta_closed_form", closed.theta, options);
    doc["q"] = closed.q;
    doc["maximizers"] = closed.maximizers;
  }
  put(doc, "theta_uniform", formulas::dct_uniform_shared(inst), options);
  doc["m"] = rational_list(best.m);
  doc["load"] = best.scheme.load().str();
  doc["dct"] = best.scheme.completion_time(inst.C).str();
  write_scheme(best.scheme, doc);
  return doc;
}

VerifyResult cmd_verify(const InstanceFile& file, const Json& scheme_doc, const std::string& scheme_name,
                        const Options& options) {
  CacheInstance inst = file.cache;
  if (inst.m.empty()) {
    if (!scheme_doc.is_object() || !scheme_doc.contains("m")) {
      throw ValidationError(scheme_name + ": the instance has no \"m\" and the scheme does not carry one");
    }
    const Json& m = scheme_doc["m"];
    if (!m.is_array()) throw ValidationError(scheme_name + ": field \"m\" must be an array");
    for (std::size_t i = 0; i < m.size(); ++i) inst.m.push_back(to_rational(m[i], scheme_name + ": m[" + std::to_string(i) + "]"));
  }
  validate_instance(inst);
  warn_if_large(inst.K);
  model::Scheme s = read_scheme(scheme_doc, inst.K, scheme_name);

  VerifyResult result;
  Json& report = result.report;
  bool pass = true;

  lp::FeasibilityReport feasibility = model::check_scheme(inst, s);
  report["feasible"] = feasibility.feasible();
  Json violations = Json::array();
  for (const lp::Violation& v : feasibility.violations) {
    violations.push_back({{"row", v.label}, {"activity", v.activity.str()}, {"rhs", v.rhs.str()}, {"amount", v.amount.str()}});
  }
  report["violations"] = std::move(violations);
  pass = pass && feasibility.feasible();

  Json side = Json::array();
  for (const model::SideInfoViolation& v : model::check_side_information(s)) {
    side.push_back({{"S", v.S_prime.str()}, {"user", v.j}, {"demand", v.demand.str()}, {"available", v.available.str()}});
  }
  pass = pass && side.empty();
  report["side_information"] = std::move(side);

  Rational load = s.load();
  put(report, "load", load, options);
  if (scheme_doc.contains("load")) {
    Rational claimed = to_rational(scheme_doc["load"], scheme_name + ": load");
    report["claimed_load"] = claimed.str();
    report["load_matches"] = claimed == load;
    pass = pass && claimed == load;
  }
  if (file.C) {
    if (static_cast<int>(file.C->size()) != inst.K) throw ValidationError("C has the wrong number of entries");
    put(report, "dct", s.completion_time(*file.C), options);
  }

  // Infeasible schemes are still simulated when they can be laid out, so the report names
  // the users that fail to decode.
  std::optional<scheme::MaterializedScheme> ms;
  if (feasibility.feasible()) {
    ms = scheme::materialize(s, inst);
  } else {
    try {
      ms = scheme::materialize(s, inst);
    } catch (const ResourceLimitError&) {
      throw;
    } catch (const Error& e) {
      report["simulation"] = std::string("skipped: ") + e.what();
    }
  }
  if (ms) {
    scheme::SimulationReport sim = scheme::simulate_and_decode(*ms);
    report["packets"] = ms->P;
    report["packets_transmitted"] = sim.packets_transmitted;
    if (feasibility.feasible()) {
      scheme::Measurement measured = scheme::measure(*ms, file.C);
      put(report, "measured_load", measured.load, options);
      if (measured.dct) put(report, "measured_dct", *measured.dct, options);
    }
    Json users = Json::array();
    for (const scheme::UserReport& u : sim.users) {
      Json missing = Json::array();
      for (const scheme::PacketRange& r : u.missing) missing.push_back(range_text(r));
      users.push_back({{"user", u.user},
                       {"file", u.file},
                       {"recovered", u.recovered},
                       {"pass", u.pass},
                       {"missing", std::move(missing)},
                       {"failures", u.failures}});
    }
    report["users"] = std::move(users);
    pass = pass && sim.passed();
  }
  report["pass"] = pass;
  result.pass = pass;
  return result;
}

std::string cmd_sweep(const SweepSpec& spec, const Options& options) {
  warn_if_large(spec.K);
  std::vector<Rational> grid = spec.grid();
  if (grid.empty()) throw ValidationError("grid is empty");

  std::vector<std::string> header{"x"};
  switch (spec.mode) {
    case SweepMode::LoadVsM1:
      header.insert(header.end(), {"achievable", "uncoded_lb", "amiri_lb", "cutset_lb"});
      break;
    case SweepMode::DctVsMtot:
      header.insert(header.end(), {"theta_star", "theta_unif"});
      break;
    case SweepMode::AllocVsMtot:
      header.push_back("theta_star");
      for (int k = 1; k <= spec.K; ++k) header.push_back("m_star_" + std::to_string(k));
      break;
  }

  std::vector<std::vector<std::string>> rows(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        rows[i] = sweep_row(spec, grid[i], options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t jobs = options.jobs > 0 ? static_cast<std::size_t>(options.jobs)
                                      : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  jobs = std::min(jobs, grid.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::ostringstream csv;
  auto line = [&csv](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) csv << (i ? "," : "") << fields[i];
    csv << '\n';
  };
  line(header);
  for (const auto& row : rows) line(row);
  return csv.str();
}

int run(const std::string& verb, const Options& options, std::ostream& out, std::ostream& err) {
  try {
    auto need = [&](const std::string& value, const char* flag) {
      if (value.empty()) throw ArgumentError(verb + " requires " + flag);
      return value;
    };
    auto emit = [&](const std::string& text) {
      if (options.out.empty()) {
        out << text;
      } else {
        write_file(options.out, text);
      }
    };
    if (options.decimals < 0 || options.decimals > 100) throw ArgumentError("--decimals must lie in [0,100]");
    if (options.jobs < 0) throw ArgumentError("--jobs must be nonnegative");

    if (verb == "load") {
      InstanceFile inst = load_instance(need(options.instance, "--instance"));
      emit(cmd_load(inst, options, options.dump_lp ? &err : nullptr).dump(2) + "\n");
      return 0;
    }
    if (verb == "allocate") {
      InstanceFile inst = load_instance(need(options.instance, "--instance"));
      if (!inst.has_capacity()) throw ValidationError(options.instance + ": allocate needs \"C\" and \"m_tot\"");
      emit(cmd_allocate(inst, options).dump(2) + "\n");
      return 0;
    }
    if (verb == "verify") {
      InstanceFile inst = load_instance(need(options.instance, "--instance"));
      const std::string& path = need(options.scheme, "--scheme");
      VerifyResult result = cmd_verify(inst, parse_json(read_file(path), path), path, options);
      emit(result.report.dump(2) + "\n");
      if (!result.pass) err << "verification failed\n";
      return result.pass ? 0 : 2;
    }
    if (verb == "sweep") {
      const std::string& path = need(options.spec, "--spec");
      emit(cmd_sweep(parse_sweep_spec(read_file(path), path), options));
      return 0;
    }
    throw ArgumentError("unknown command: " + verb);
  } catch (const ResourceLimitError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace cachecraft::cli
