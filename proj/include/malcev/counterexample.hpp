#pragma once

// Exact models of two infinite algebras on the naturals with one basic
// operation that is constant on a small special domain and injective
// elsewhere. Off the special domain the operation returns a formal
// application node, so injectivity (and disjointness from the small
// naturals) hold by construction rather than by a numeric encoding.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "malcev/cube.hpp"
#include "malcev/free_value.hpp"

namespace malcev {

  using FreeCube = LabeledCube<FreeValue>;

  class Family {
   public:
    // t(x,y,z) = 3 on (0,0,0) and (1,2,0), s(x,y,z) otherwise.
    static Family C();
    // t_k(x_0..x_k) = k+2 on {(0,0),(1,2)} x {0,3} x ... x {0,k+1} minus
    // (1,2,...,k+1), an injective application otherwise. Needs k >= 2.
    static Family Ck(std::size_t k);

    std::string const& name() const noexcept { return _name; }
    std::size_t        parameter() const noexcept { return _k; }
    std::size_t        arity() const noexcept { return _arity; }
    std::uint64_t      special_value() const noexcept { return _special; }
    std::string const& tag() const noexcept { return _tag; }

    // Whether a tuple of naturals lies in the special domain.
    bool in_special_domain(std::span<std::uint64_t const> xs) const;

    FreeValue eval(FreeStore& store, std::span<FreeValue const> args) const;

    // Default seeds {0, ..., special value}.
    std::vector<std::uint64_t> default_seeds() const;

   private:
    std::string   _name;
    std::size_t   _k       = 0;
    std::size_t   _arity   = 0;
    std::uint64_t _special = 0;
    std::string   _tag;
  };

  FreeValue eval_C(FreeStore& store, FreeValue x, FreeValue y, FreeValue z);
  // Throws ValidationError unless args.size() == k + 1 and k >= 2.
  FreeValue eval_Ck(FreeStore& store, std::size_t k,
                    std::span<FreeValue const> args);

  // Vertexwise application of the family's operation.
  FreeCube apply_family(FreeStore& store, Family const& fam,
                        std::span<FreeCube const> cubes);

  FreeCube free_generator(FreeStore& store, CubeShape const& shape, Coord i,
                          std::uint64_t x, std::uint64_t y);

  struct FreeViolation {
    FreeCube                       cube;
    Coord                          direction = 0;
    std::vector<std::size_t>       delta_pairs;
    std::pair<FreeValue, FreeValue> offending_pair;
  };

  // Centrality check with delta = identity (structural equality).
  std::optional<FreeViolation> identity_violation(FreeCube const& cube,
                                                  Coord           direction);

  struct TcWitness {
    FreeCube      square;         // oriented to violate the max direction
    FreeCube      display_square; // the same square transposed
    FreeViolation violation;
  };

  // t(cube_1(0,1), cube_1(0,2), cube_0(0,1)) for family C.
  TcWitness direct_tc_witness(FreeStore& store);

  struct HyperWitness {
    FreeCube      square1;      // vertexwise t(f_0, 0, f_1)
    FreeCube      square2;      // vertexwise t(1, 2 f_0, f_1)
    FreeCube      shared_face;  // face^1 of square1 = face^0 of square2
    FreeCube      glued;        // glued along direction 0
    FreeCube      oriented;     // glued, transposed into the max direction
    FreeViolation violation;
  };

  HyperWitness glued_hyper_witness(FreeStore& store);

  struct EtaWitness {
    std::size_t   k = 0;
    FreeCube      eta;
    std::size_t   special_vertices = 0;
    FreeViolation violation;
  };

  // t_k(cube_0(0,1), cube_0(0,2), cube_1(0,3), ..., cube_{k-1}(0,k+1)).
  // Throws std::logic_error if the expected shape of eta does not appear.
  EtaWitness eta_witness(FreeStore& store, std::size_t k);

  ////////////////////////////////////////////////////////////////////////
  // Bounded search
  ////////////////////////////////////////////////////////////////////////

  struct SearchOptions {
    std::size_t                depth = 2;
    std::vector<std::uint64_t> seeds;           // empty: family defaults
    std::size_t                max_leaves = 0;  // 0: the cube dimension k
    unsigned                   threads    = 1;
    // Depth-1 searches with one generator per coordinate enumerate argument
    // tuples directly instead of per selection.
    bool                       factorized = true;
    // Guard on explicitly evaluated terms per leaf selection below the
    // last level.
    std::uint64_t max_intermediate = std::uint64_t(1) << 22;
  };

  struct SearchResult {
    std::string                  family;
    std::size_t                  k          = 0;
    std::size_t                  depth      = 0;
    std::size_t                  max_leaves = 0;
    std::vector<std::uint64_t>   seeds;
    std::uint64_t                leaf_selections = 0;
    // Every term enumerated; each one is decided, either by evaluation or
    // by a sound non-violation argument.
    std::uint64_t                terms_total     = 0;
    // Terms evaluated in full.
    std::uint64_t                terms_evaluated = 0;
    std::uint64_t                violations      = 0;
    std::optional<FreeViolation> first_violation;
  };

  // Enumerates the cubes t-terms of depth <= `depth` produce from at most
  // `max_leaves` distinct non-constant generator cubes cube_i(x, y)
  // (x != y seeds) and constant cubes over the seeds, and counts those
  // violating (identity, k-1)-centrality.
  //
  // A term can only violate centrality if it depends on every coordinate
  // (otherwise the number of equal line pairs is even, or all of them are
  // equal), so leaf selections that miss a coordinate are skipped. With
  // max_leaves = k this leaves one generator per coordinate.
  SearchResult search_polyk_violation(FreeStore& store, Family const& fam,
                                      std::size_t k, SearchOptions opts = {});

  // Reference enumeration: evaluates every term explicitly, without the
  // class grouping and pruning. Only for small configurations.
  SearchResult search_polyk_violation_naive(FreeStore& store, Family const& fam,
                                            std::size_t k, SearchOptions opts);

  ////////////////////////////////////////////////////////////////////////
  // Reports
  ////////////////////////////////////////////////////////////////////////

  struct WitnessReport {
    std::string family;
    std::size_t k = 0;
    // Family C: the direct square. Family Ck: eta.
    bool                         found_tc_violation = false;
    std::optional<FreeViolation> tc_violation;
    std::optional<FreeCube>      tc_display;  // C only: transposed square
    std::optional<EtaWitness>    eta;
    std::optional<HyperWitness>  hyper;       // C only
    SearchResult                 search;

    // Every expected witness is present and the search found nothing.
    bool ok() const;
  };

  // Family C needs k == 2 for the witnesses; Ck takes its own k.
  WitnessReport witness_report(FreeStore& store, Family const& fam,
                               std::size_t k, SearchOptions const& opts);

}  // namespace malcev
