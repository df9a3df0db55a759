// malcev: congruence generation, higher-dimensional congruences,
// commutators and the counterexample lab from the command line.
//
// Exit codes: 0 success, 1 property failure, 2 invalid input or a refused
// resource guard.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "malcev/json_io.hpp"

namespace {

  using namespace malcev;

  struct Globals {
    unsigned    threads       = 0;
    bool        single_thread = false;
    bool        force         = false;
    std::string format        = "json";
    std::vector<Coord> order;

    ExecOptions exec() const {
      ExecOptions e;
      e.threads = single_thread ? 1 : (threads == 0 ? default_threads() : threads);
      e.force   = force;
      e.max_cubes       = max_cubes_from_env();
      e.direction_order = order;
      return e;
    }

    static unsigned default_threads() {
      unsigned n = std::thread::hardware_concurrency();
      return n == 0 ? 1 : n;
    }
  };

  std::vector<std::string> split(std::string const& s, char sep) {
    std::vector<std::string> out;
    std::string              cur;
    std::istringstream       in(s);
    while (std::getline(in, cur, sep)) {
      out.push_back(cur);
    }
    return out;
  }

  Elem parse_elem(std::string const& s, std::size_t n) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(s, &pos);
    } catch (std::exception const&) {
      throw ValidationError("not an element: '" + s + "'");
    }
    if (pos != s.size() || v >= n) {
      throw ValidationError("element '" + s + "' outside {0, ..., "
                            + std::to_string(n - 1) + "}");
    }
    return static_cast<Elem>(v);
  }

  // `full`, `id`, or blocks such as 0-2/1-3.
  Partition parse_theta(std::string const& tok, std::size_t n) {
    if (tok == "full") {
      return Partition::full(n);
    }
    if (tok == "id") {
      return Partition::identity(n);
    }
    std::vector<std::vector<Partition::index_type>> blocks;
    for (auto const& b : split(tok, '/')) {
      std::vector<Partition::index_type> block;
      for (auto const& e : split(b, '-')) {
        block.push_back(parse_elem(e, n));
      }
      blocks.push_back(std::move(block));
    }
    return Partition::from_blocks(n, blocks);
  }

  void emit(Globals const& g, Json const& j, std::string const& text) {
    if (g.format == "text") {
      std::cout << text;
    } else {
      std::cout << j.dump(2) << "\n";
    }
  }

  std::string blocks_text(Partition const& p) {
    std::string s;
    for (auto const& b : p.blocks()) {
      s += "{";
      for (std::size_t i = 0; i < b.size(); ++i) {
        s += (i ? "," : "") + std::to_string(b[i]);
      }
      s += "}";
    }
    return s;
  }

  // Squares render as (g00, g10 / g01, g11); other dimensions as a list.
  template <typename Label>
  std::string cube_text(std::vector<Label> const& labels) {
    if (labels.size() == 4) {
      return "(" + labels[0] + ", " + labels[1] + " / " + labels[2] + ", "
             + labels[3] + ")";
    }
    std::string s = "(";
    for (std::size_t i = 0; i < labels.size(); ++i) {
      s += (i ? ", " : "") + labels[i];
    }
    return s + ")";
  }

  std::string cube_text(LabeledCube<Elem> const& c) {
    std::vector<std::string> l;
    for (auto x : c.labels) {
      l.push_back(std::to_string(x));
    }
    return cube_text(l);
  }

  std::string cube_text(FreeStore const& st, FreeCube const& c) {
    std::vector<std::string> l;
    for (auto x : c.labels) {
      l.push_back(st.to_sexpr(x));
    }
    return cube_text(l);
  }

  ////////////////////////////////////////////////////////////////////////

  struct CgArgs {
    std::string              algebra;
    std::vector<std::string> pairs;
  };

  int run_cg(Globals const& g, CgArgs const& a) {
    auto alg = algebra_from_json(read_json_file(a.algebra));
    std::vector<std::pair<Elem, Elem>> pairs;
    for (auto const& p : a.pairs) {
      if (p.empty()) {
        continue;
      }
      auto xy = split(p, ':');
      if (xy.size() != 2) {
        throw ValidationError("pairs are written x:y, got '" + p + "'");
      }
      pairs.emplace_back(parse_elem(xy[0], alg.size()),
                         parse_elem(xy[1], alg.size()));
    }
    auto p = cg(alg, pairs);
    emit(g, {{"algebra", alg.name()}, {"blocks", partition_to_json(p)}},
         blocks_text(p) + "\n");
    return 0;
  }

  struct ThetaArgs {
    std::string algebra, cubes, route = "both";
  };

  int run_theta(Globals const& g, ThetaArgs const& a) {
    auto alg  = algebra_from_json(read_json_file(a.algebra));
    auto gens = cubes_from_json(read_json_file(a.cubes), alg.size());
    auto exec = g.exec();

    std::vector<Route> routes;
    if (a.route == "both") {
      routes = {Route::basic_ops, Route::pol_k};
    } else {
      routes = {route_from_string(a.route)};
    }
    std::vector<ThetaResult> res;
    for (auto r : routes) {
      res.push_back(theta(alg, gens, r, exec));
    }
    bool const equal = res.size() < 2 || res[0].relation == res[1].relation;
    auto const cong  = is_higher_congruence(alg, res[0].relation);

    Json j = cubes_to_json(res[0].relation);
    j["size"]          = res[0].relation.size();
    j["is_congruence"] = cong.ok;
    Json reports       = Json::array();
    for (auto const& r : res) {
      reports.push_back(report_to_json(r.report));
    }
    j["reports"] = reports;
    if (routes.size() == 2) {
      j["routes_equal"] = equal;
    }
    std::ostringstream t;
    t << "size " << res[0].relation.size() << "\n";
    for (auto const& r : res) {
      t << to_string(r.report.route) << ":";
      for (auto const& ph : r.report.phases) {
        t << " " << ph.name << "=" << ph.rounds;
      }
      t << "\n";
    }
    if (routes.size() == 2) {
      t << "routes_equal " << (equal ? "true" : "false") << "\n";
    }
    t << "is_congruence " << (cong.ok ? "true" : "false") << "\n";
    emit(g, j, t.str());
    return equal && cong.ok ? 0 : 1;
  }

  struct CommArgs {
    std::string          algebra;
    std::size_t          arity  = 2;
    std::string          thetas = "full";
    std::string          kind   = "tc";
    std::string          route  = "basic";
    std::optional<Coord> direction;
    bool                 oracle = false;
    bool                 batch  = false;
  };

  int run_commutator(Globals const& g, CommArgs const& a) {
    auto alg = algebra_from_json(read_json_file(a.algebra));
    if (a.arity < 2) {
      throw ValidationError("commutators need arity >= 2");
    }
    auto toks = split(a.thetas, ',');
    if (toks.size() == 1) {
      std::string const only = toks[0];
      toks.assign(a.arity, only);
    }
    if (toks.size() != a.arity) {
      throw ValidationError("--thetas lists " + std::to_string(toks.size())
                            + " congruences for arity "
                            + std::to_string(a.arity));
    }
    std::vector<Partition> thetas;
    for (auto const& t : toks) {
      thetas.push_back(parse_theta(t, alg.size()));
    }
    CommutatorOptions opts;
    opts.exec      = g.exec();
    opts.route     = route_from_string(a.route);
    opts.direction = a.direction;
    opts.batch     = a.batch;
    auto const kind = kind_from_string(a.kind);
    auto       res  = commutator(alg, thetas, kind, opts);

    Json j   = commutator_to_json(res);
    bool ok  = true;
    std::ostringstream t;
    t << to_string(kind) << " " << blocks_text(res.value) << "\n";
    if (kind == CommutatorKind::hyper) {
      auto tc       = commutator(alg, thetas, CommutatorKind::tc, opts);
      bool const le = res.value.contains(tc.value);
      j["tc_value"]    = partition_to_json(tc.value);
      j["tc_le_hyper"] = le;
      t << "tc_le_hyper " << (le ? "true" : "false") << "\n";
      ok = ok && le;
    }
    if (a.oracle) {
      auto o        = oracle_commutator(alg, thetas, kind, opts);
      bool const eq = o == res.value;
      j["oracle"]   = {{"value", partition_to_json(o)}, {"agrees", eq}};
      t << "oracle " << (eq ? "agrees" : "disagrees") << "\n";
      ok = ok && eq;
    }
    for (auto const& v : res.witness_trace) {
      t << "witness " << cube_text(v.cube) << " direction " << v.direction
        << "\n";
    }
    emit(g, j, t.str());
    return ok ? 0 : 1;
  }

  struct CexArgs {
    std::string              family = "C";
    std::size_t              k      = 2;
    std::size_t              depth  = 2;
    std::size_t              max_leaves = 0;
    std::vector<std::uint64_t> seeds;
  };

  int run_counterexample(Globals const& g, CexArgs const& a) {
    Family fam = a.family == "C"    ? Family::C()
                 : a.family == "Ck" ? Family::Ck(a.k)
                                    : throw ValidationError(
                                        "unknown family '" + a.family + "'");
    SearchOptions so;
    so.depth      = a.depth;
    so.seeds      = a.seeds;
    so.max_leaves = a.max_leaves;
    so.threads    = g.exec().threads;
    FreeStore store;
    auto      rep = witness_report(store, fam, a.k, so);

    std::ostringstream t;
    t << "family " << rep.family << " k " << rep.k << "\n";
    if (rep.tc_violation) {
      t << "tc violation " << cube_text(store, rep.tc_violation->cube)
        << " direction " << rep.tc_violation->direction << "\n";
    }
    if (rep.eta) {
      t << "eta special vertices " << rep.eta->special_vertices << " of "
        << rep.eta->eta.labels.size() << "\n";
    }
    if (rep.hyper) {
      t << "square1 " << cube_text(store, rep.hyper->square1) << "\n"
        << "square2 " << cube_text(store, rep.hyper->square2) << "\n"
        << "glued   " << cube_text(store, rep.hyper->glued) << "\n";
    }
    t << "search depth " << rep.search.depth << " terms "
      << rep.search.terms_total << " violations " << rep.search.violations
      << "\n";
    emit(g, witness_report_to_json(store, rep), t.str());
    return rep.ok() ? 0 : 1;
  }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher-dimensional congruences and commutators of finite "
               "algebras"};
  app.require_subcommand(1);

  Globals g;
  app.add_option("--threads", g.threads, "Worker threads (default: all cores)");
  app.add_flag("--single-thread", g.single_thread, "Run on one thread");
  app.add_flag("--force", g.force, "Ignore the cube-space guard");
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"json", "text"}));
  app.add_option("--direction-order", g.order,
                 "Order in which transitive closure visits directions");

  CgArgs cga;
  auto*  cg_cmd = app.add_subcommand("cg", "Principal congruence generation");
  cg_cmd->add_option("--algebra", cga.algebra)->required();
  cg_cmd->add_option("--pairs", cga.pairs, "Pairs x:y")->expected(0, -1);

  ThetaArgs ta;
  auto* th_cmd = app.add_subcommand(
      "theta", "Higher-dimensional congruence generated by a cube set");
  th_cmd->add_option("--algebra", ta.algebra)->required();
  th_cmd->add_option("--cubes", ta.cubes)->required();
  th_cmd->add_option("--route", ta.route)
      ->check(CLI::IsMember({"both", "basic", "polyk"}));

  CommArgs ca;
  auto* cm_cmd = app.add_subcommand("commutator", "Commutator of congruences");
  cm_cmd->add_option("--algebra", ca.algebra)->required();
  cm_cmd->add_option("--arity", ca.arity);
  cm_cmd->add_option("--thetas", ca.thetas,
                     "Comma-separated: full, id, or blocks like 0-2/1-3");
  cm_cmd->add_option("--kind", ca.kind)
      ->check(CLI::IsMember({"tc", "hyper"}));
  cm_cmd->add_option("--route", ca.route)
      ->check(CLI::IsMember({"basic", "polyk"}));
  cm_cmd->add_option("--direction", ca.direction);
  cm_cmd->add_flag("--oracle", ca.oracle, "Cross-check by enumeration");
  cm_cmd->add_flag("--batch", ca.batch, "Merge all violations per scan");

  CexArgs xa;
  auto* cx_cmd = app.add_subcommand("counterexample",
                                    "Witnesses and bounded polynomial search");
  cx_cmd->add_option("--family", xa.family)->check(CLI::IsMember({"C", "Ck"}));
  cx_cmd->add_option("--k", xa.k);
  cx_cmd->add_option("--depth", xa.depth);
  cx_cmd->add_option("--max-leaves", xa.max_leaves);
  cx_cmd->add_option("--seeds", xa.seeds)->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*cg_cmd) {
      return run_cg(g, cga);
    }
    if (*th_cmd) {
      return run_theta(g, ta);
    }
    if (*cm_cmd) {
      return run_commutator(g, ca);
    }
    return run_counterexample(g, xa);
  } catch (ValidationError const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (ResourceLimitError const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (std::logic_error const& e) {
    std::cerr << "internal check failed: " << e.what() << "\n";
    return 1;
  }
}
