#pragma once

// Fixpoint machinery for higher-dimensional relations: symmetric/reflexive
// closure, closure under the basic operations (tolerance generation),
// directional transitive closures, and generation of higher-dimensional
// congruences along two independent routes.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "malcev/algebra.hpp"
#include "malcev/relation.hpp"

namespace malcev {

  enum class Route { basic_ops, pol_k };

  std::string to_string(Route r);
  Route       route_from_string(std::string const& s);

  struct ExecOptions {
    unsigned threads = 1;
    // Order in which tc cycles through directions; empty means ascending.
    std::vector<Coord> direction_order;
    bool               force     = false;
    std::uint64_t      max_cubes = default_max_cubes;
  };

  // Throws ResourceLimitError if |A|^(2^k) exceeds the guard and `force` is
  // not set.
  void check_cube_space(CubeCodec const& codec, ExecOptions const& opts);

  struct ClosurePhase {
    std::string              name;
    std::size_t              rounds = 0;
    std::vector<std::size_t> sizes;  // relation size after each round
  };

  struct ClosureReport {
    Route                     route = Route::basic_ops;
    std::vector<ClosurePhase> phases;
  };

  CubeRelation close_sym_refl(CubeRelation const& r);

  // Joint fixpoint of sym, refl and every basic operation applied
  // vertexwise. Applied to a set of generators this is tol_S of them.
  CubeRelation close_under_ops(FiniteAlgebra const& alg, CubeRelation const& r,
                               ExecOptions const& opts = {});

  // Directional transitive closure: the face pairs in direction i read as
  // a digraph on (k-1)-cubes, transitively closed and glued back.
  CubeRelation dtc(CubeRelation const& r, Coord i,
                   ExecOptions const& opts = {});

  // Rounds of dtc in every direction from the same input, until a round
  // adds nothing.
  CubeRelation tc(CubeRelation const& r, ExecOptions const& opts = {},
                  ClosurePhase* phase = nullptr);

  // Least superset P of r such that, for every choice of at most k cubes
  // of P, the subalgebra of A^(2^k) they generate together with the
  // constant cubes over C (the subalgebra generated by the labels of r)
  // lies in P. That subalgebra is exactly the set of images of the k-ary
  // polynomials with constants from C, so P is closure under Pol_k(C).
  // Throws ValidationError on empty input.
  CubeRelation close_pol_k(FiniteAlgebra const& alg, CubeRelation const& r,
                           ExecOptions const& opts = {});

  struct ThetaResult {
    CubeRelation  relation;
    ClosureReport report;
  };

  // Higher-dimensional congruence generated by g:
  //   basic_ops: tc(close_under_ops(close_sym_refl(g)))
  //   pol_k:     tc(close_pol_k(close_sym_refl(g)))
  ThetaResult theta(FiniteAlgebra const& alg, CubeRelation const& g,
                    Route route, ExecOptions const& opts = {});

  ////////////////////////////////////////////////////////////////////////
  // Predicates
  ////////////////////////////////////////////////////////////////////////

  struct CheckResult {
    bool                             ok = true;
    std::optional<LabeledCube<Elem>> counterexample;
    std::string                      reason;

    explicit operator bool() const noexcept { return ok; }
  };

  CheckResult is_S_reflexive(CubeRelation const& r);
  CheckResult is_S_symmetric(CubeRelation const& r);
  CheckResult is_S_transitive(CubeRelation const& r);
  CheckResult is_compatible(FiniteAlgebra const& alg, CubeRelation const& r);
  CheckResult is_tolerance(FiniteAlgebra const& alg, CubeRelation const& r);
  CheckResult is_higher_congruence(FiniteAlgebra const& alg,
                                   CubeRelation const&  r);

}  // namespace malcev
