#include "malcev/cube.hpp"

namespace malcev {

  LabeledCube<Elem> apply_op_to_cubes(FiniteAlgebra const&               alg,
                                      std::string const&                 op,
                                      std::span<LabeledCube<Elem> const> cubes,
                                      CubeShape const&                   shape) {
    std::size_t const idx = alg.operation_index(op);
    if (cubes.size() != alg.operation(idx).arity) {
      throw ValidationError("operation '" + op + "' expects "
                            + std::to_string(alg.operation(idx).arity)
                            + " cubes, got " + std::to_string(cubes.size()));
    }
    for (auto const& c : cubes) {
      for (Elem x : c.labels) {
        if (x >= alg.size()) {
          throw ValidationError("cube label outside the carrier");
        }
      }
    }
    return apply_vertexwise<Elem>(
        [&](std::span<Elem const> args) { return alg.apply(idx, args); },
        cubes, shape);
  }

  RectComplex<Elem> apply_op_to_complexes(FiniteAlgebra const&               alg,
                                          std::string const&                 op,
                                          std::span<RectComplex<Elem> const> cs) {
    std::size_t const idx = alg.operation_index(op);
    if (cs.size() != alg.operation(idx).arity || cs.empty()) {
      throw ValidationError("operation '" + op
                            + "' applied to the wrong number of complexes");
    }
    for (auto const& c : cs) {
      if (c.dims != cs.front().dims) {
        throw ValidationError("complexes have different dimensions");
      }
    }
    std::vector<Elem> labels(cs.front().labels.size());
    std::vector<Elem> args(cs.size());
    for (std::size_t p = 0; p < labels.size(); ++p) {
      for (std::size_t j = 0; j < cs.size(); ++j) {
        args[j] = cs[j].labels[p];
      }
      labels[p] = alg.apply(idx, args);
    }
    return RectComplex<Elem>(cs.front().dims, std::move(labels));
  }

}  // namespace malcev
