#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "malcev/algebra.hpp"
#include "malcev/closure.hpp"
#include "malcev/relation.hpp"

namespace malcev {

  enum class CommutatorKind { tc, hyper };

  std::string    to_string(CommutatorKind k);
  CommutatorKind kind_from_string(std::string const& s);

  // A cube with exactly 2^(k-1) - 1 of its direction-i line pairs in delta.
  struct CentralityViolation {
    LabeledCube<Elem>                 cube;
    Coord                             direction = 0;
    // Vertices of lines(cube, direction), as indices into the (k-1)-cube,
    // whose pair lies in delta.
    std::vector<std::size_t>          delta_pairs;
    std::pair<Elem, Elem>             offending_pair;
  };

  // Generators cube_i(x, y) for (x, y) in theta_i, one theta per coordinate
  // of `shape`. Every theta must be a congruence of `alg`.
  CubeRelation commutator_generators(FiniteAlgebra const&          alg,
                                     std::vector<Partition> const& thetas,
                                     CubeShape const&              shape);

  // M({theta_i}): the tolerance generated by the generators.
  CubeRelation matrices(FiniteAlgebra const& alg,
                        std::vector<Partition> const& thetas,
                        CubeShape const& shape, ExecOptions const& opts = {});

  // Delta({theta_i}): the higher-dimensional congruence they generate.
  CubeRelation delta(FiniteAlgebra const& alg,
                     std::vector<Partition> const& thetas,
                     CubeShape const& shape, Route route = Route::basic_ops,
                     ExecOptions const& opts = {});

  // First violation of (delta, i)-centrality in code order, if any.
  std::optional<CentralityViolation>
  check_centrality(CubeRelation const& r, Partition const& delta, Coord i,
                   ExecOptions const& opts = {});

  struct CommutatorOptions {
    ExecOptions          exec;
    Route                route = Route::basic_ops;
    // Centrality direction; defaults to the greatest coordinate.
    std::optional<Coord> direction;
    // Merge every violation found in a scan before re-scanning; the result
    // is the same least fixpoint.
    bool batch = false;
  };

  struct CommutatorResult {
    Partition                        value;
    CommutatorKind                   kind = CommutatorKind::tc;
    std::vector<CentralityViolation> witness_trace;
    std::size_t                      relation_size = 0;
  };

  // Least delta for which M (kind tc) or Delta (kind hyper) has
  // (delta, direction)-centrality. Needs at least two thetas.
  CommutatorResult commutator(FiniteAlgebra const&          alg,
                              std::vector<Partition> const& thetas,
                              CommutatorKind                kind,
                              CommutatorOptions const&      opts = {});

  // Same, on a relation that has already been built.
  CommutatorResult commutator_on(FiniteAlgebra const& alg,
                                 CubeRelation const& r, CommutatorKind kind,
                                 Coord direction, bool batch = false,
                                 ExecOptions const& exec = {});

  // Meet of every congruence delta with centrality: the literal reading of
  // the definition, used as an oracle.
  Partition oracle_commutator(FiniteAlgebra const&          alg,
                              std::vector<Partition> const& thetas,
                              CommutatorKind                kind,
                              CommutatorOptions const&      opts = {},
                              std::size_t size_limit = default_congruence_size_limit);

}  // namespace malcev
