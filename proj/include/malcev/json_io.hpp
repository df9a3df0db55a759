#pragma once

// JSON encodings of algebras, cube sets and reports. Output is
// deterministic: blocks and cube lists are sorted, keys are ordered.

#include <filesystem>
#include <string>

#include "json.hpp"
#include "malcev/algebra.hpp"
#include "malcev/closure.hpp"
#include "malcev/commutator.hpp"
#include "malcev/counterexample.hpp"
#include "malcev/relation.hpp"

namespace malcev {

  using Json = nlohmann::json;

  // {"name", "size", "operations": [{"name", "arity", "table"}]}
  FiniteAlgebra algebra_from_json(Json const& j);
  Json          algebra_to_json(FiniteAlgebra const& alg);

  // {"dimension", "coords", "cubes": [[2^k labels in vertex order], ...]}
  CubeRelation cubes_from_json(Json const& j, std::size_t carrier);
  Json         cubes_to_json(CubeRelation const& r);

  Json partition_to_json(Partition const& p);  // sorted blocks
  Json report_to_json(ClosureReport const& rep);
  Json violation_to_json(CentralityViolation const& v);
  Json commutator_to_json(CommutatorResult const& res);

  std::string sexpr_list(FreeStore const& store, FreeCube const& c);
  Json        free_cube_to_json(FreeStore const& store, FreeCube const& c);
  Json        free_violation_to_json(FreeStore const& store,
                                     FreeViolation const& v);
  Json        search_to_json(FreeStore const& store, SearchResult const& r);
  Json        witness_report_to_json(FreeStore const&     store,
                                     WitnessReport const& rep);

  // Throws ValidationError if the file is missing or malformed.
  Json read_json_file(std::filesystem::path const& path);

}  // namespace malcev
