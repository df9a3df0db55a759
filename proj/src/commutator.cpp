#include "malcev/commutator.hpp"

#include <algorithm>

#include "malcev/parallel.hpp"

namespace malcev {

  std::string to_string(CommutatorKind k) {
    return k == CommutatorKind::tc ? "tc" : "hyper";
  }

  CommutatorKind kind_from_string(std::string const& s) {
    if (s == "tc") {
      return CommutatorKind::tc;
    }
    if (s == "hyper" || s == "h") {
      return CommutatorKind::hyper;
    }
    throw ValidationError("unknown commutator kind '" + s + "'");
  }

  CubeRelation commutator_generators(FiniteAlgebra const&          alg,
                                     std::vector<Partition> const& thetas,
                                     CubeShape const&              shape) {
    if (thetas.size() != shape.dimension()) {
      throw ValidationError("need one congruence per cube coordinate ("
                            + std::to_string(shape.dimension()) + "), got "
                            + std::to_string(thetas.size()));
    }
    for (auto const& t : thetas) {
      if (t.size() != alg.size() || !is_compatible(alg, t)) {
        throw ValidationError("commutator arguments must be congruences");
      }
    }
    CubeCodec             codec(alg.size(), shape);
    std::vector<CubeCode> codes;
    for (std::size_t p = 0; p < thetas.size(); ++p) {
      Coord const i = shape.coords()[p];
      for (Elem x = 0; x < alg.size(); ++x) {
        for (Elem y = 0; y < alg.size(); ++y) {
          if (thetas[p].same(x, y)) {
            codes.push_back(codec.encode(cube_from_pair(shape, i, x, y)));
          }
        }
      }
    }
    return CubeRelation(std::move(codec), std::move(codes));
  }

  CubeRelation matrices(FiniteAlgebra const&          alg,
                        std::vector<Partition> const& thetas,
                        CubeShape const& shape, ExecOptions const& opts) {
    auto g = commutator_generators(alg, thetas, shape);
    return close_under_ops(alg, close_sym_refl(g), opts);
  }

  CubeRelation delta(FiniteAlgebra const&          alg,
                     std::vector<Partition> const& thetas,
                     CubeShape const& shape, Route route,
                     ExecOptions const& opts) {
    auto g = commutator_generators(alg, thetas, shape);
    return theta(alg, g, route, opts).relation;
  }

  namespace {
    // Returns the violation for cube c, if c is one.
    std::optional<CentralityViolation>
    violation_at(CubeCodec const& codec, CubeCode c, Partition const& d,
                 std::size_t p, Coord i, std::vector<Elem>& buf) {
      codec.decode(c, buf);
      std::size_t const V    = codec.vertices();
      std::size_t const m    = std::size_t(1) << p;
      std::size_t const need = V / 2 - 1;
      std::size_t       in   = 0;
      std::optional<std::pair<Elem, Elem>> out;
      for (std::size_t v = 0; v < V; ++v) {
        if (v & m) {
          continue;
        }
        if (d.same(buf[v], buf[v | m])) {
          ++in;
        } else if (out) {
          return std::nullopt;  // two pairs outside delta
        } else {
          out = std::pair(buf[v], buf[v | m]);
        }
      }
      if (in != need || !out) {
        return std::nullopt;
      }
      CentralityViolation viol;
      viol.cube           = codec.cube(c);
      viol.direction      = i;
      viol.offending_pair = *out;
      auto ls             = lines(viol.cube, i);
      for (std::size_t g = 0; g < ls.labels.size(); ++g) {
        if (d.same(ls.labels[g].first, ls.labels[g].second)) {
          viol.delta_pairs.push_back(g);
        }
      }
      return viol;
    }
  }  // namespace

  std::optional<CentralityViolation>
  check_centrality(CubeRelation const& r, Partition const& d, Coord i,
                   ExecOptions const& opts) {
    if (r.dimension() < 2) {
      throw ValidationError("centrality needs dimension at least 2");
    }
    if (d.size() != r.carrier()) {
      throw ValidationError("partition size does not match the relation");
    }
    std::size_t const p     = r.shape().position(i);
    auto const&       codes = r.codes();
    std::size_t const n     = codes.size();
    std::size_t const chunks = number_of_chunks(n, opts.threads);
    // Each chunk reports its first violation; the earliest chunk wins, so
    // the answer does not depend on the thread count.
    std::vector<std::optional<CentralityViolation>> first(chunks);
    parallel_chunks(n, opts.threads,
                    [&](std::size_t begin, std::size_t end, std::size_t chunk) {
                      std::vector<Elem> buf(r.codec().vertices());
                      for (std::size_t e = begin; e < end; ++e) {
                        if (auto v = violation_at(r.codec(), codes[e], d, p, i,
                                                  buf)) {
                          first[chunk] = std::move(v);
                          return;
                        }
                      }
                    });
    for (auto& f : first) {
      if (f) {
        return std::move(f);
      }
    }
    return std::nullopt;
  }

  CommutatorResult commutator_on(FiniteAlgebra const& alg,
                                 CubeRelation const& r, CommutatorKind kind,
                                 Coord direction, bool batch,
                                 ExecOptions const& exec) {
    CommutatorResult result;
    result.kind          = kind;
    result.relation_size = r.size();
    result.value         = Partition::identity(alg.size());
    std::size_t const p  = r.shape().position(direction);
    std::vector<Elem> buf(r.codec().vertices());

    while (true) {
      if (!batch) {
        auto v = check_centrality(r, result.value, direction, exec);
        if (!v) {
          break;
        }
        std::pair<Elem, Elem> pr = v->offending_pair;
        result.witness_trace.push_back(std::move(*v));
        result.value = join(alg, result.value, cg(alg, std::span(&pr, 1)));
        continue;
      }
      std::vector<std::pair<Elem, Elem>> pairs;
      for (CubeCode c : r.codes()) {
        if (auto v = violation_at(r.codec(), c, result.value, p, direction,
                                  buf)) {
          pairs.push_back(v->offending_pair);
          result.witness_trace.push_back(std::move(*v));
        }
      }
      if (pairs.empty()) {
        break;
      }
      Partition merged = result.value;
      for (auto [a, b] : pairs) {
        merged.merge(a, b);
      }
      // Re-close: cg of the merged blocks.
      std::vector<std::pair<Elem, Elem>> span_pairs;
      for (auto const& block : merged.blocks()) {
        for (std::size_t j = 1; j < block.size(); ++j) {
          span_pairs.emplace_back(block[0], block[j]);
        }
      }
      result.value = cg(alg, span_pairs);
    }
    return result;
  }

  namespace {
    void check_arity(std::vector<Partition> const& thetas) {
      if (thetas.size() < 2) {
        throw ValidationError(
            "commutators need at least two congruences (arity >= 2)");
      }
    }

    CubeRelation commutator_relation(FiniteAlgebra const&          alg,
                                     std::vector<Partition> const& thetas,
                                     CommutatorKind                kind,
                                     CommutatorOptions const&      opts,
                                     CubeShape const&              shape) {
      return kind == CommutatorKind::tc
                 ? matrices(alg, thetas, shape, opts.exec)
                 : delta(alg, thetas, shape, opts.route, opts.exec);
    }
  }  // namespace

  CommutatorResult commutator(FiniteAlgebra const&          alg,
                              std::vector<Partition> const& thetas,
                              CommutatorKind                kind,
                              CommutatorOptions const&      opts) {
    check_arity(thetas);
    CubeShape shape = CubeShape::standard(thetas.size());
    Coord     dir   = opts.direction.value_or(shape.max_coord());
    auto      r     = commutator_relation(alg, thetas, kind, opts, shape);
    return commutator_on(alg, r, kind, dir, opts.batch, opts.exec);
  }

  Partition oracle_commutator(FiniteAlgebra const&          alg,
                              std::vector<Partition> const& thetas,
                              CommutatorKind                kind,
                              CommutatorOptions const&      opts,
                              std::size_t                   size_limit) {
    check_arity(thetas);
    auto      cons  = all_congruences(alg, size_limit);
    CubeShape shape = CubeShape::standard(thetas.size());
    Coord     dir   = opts.direction.value_or(shape.max_coord());
    auto      r     = commutator_relation(alg, thetas, kind, opts, shape);
    Partition result = Partition::full(alg.size());
    for (auto const& d : cons) {
      if (!check_centrality(r, d, dir, opts.exec)) {
        result = meet(result, d);
      }
    }
    return result;
  }

}  // namespace malcev
