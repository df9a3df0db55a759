#include "malcev/json_io.hpp"

#include <algorithm>
#include <fstream>

namespace malcev {

  namespace {
    template <typename T>
    T field(Json const& j, char const* key) {
      if (!j.is_object() || !j.contains(key)) {
        throw ValidationError(std::string("missing field '") + key + "'");
      }
      try {
        return j.at(key).get<T>();
      } catch (Json::exception const& e) {
        throw ValidationError(std::string("bad field '") + key
                              + "': " + e.what());
      }
    }
  }  // namespace

  FiniteAlgebra algebra_from_json(Json const& j) {
    auto const name = field<std::string>(j, "name");
    auto const size = field<std::size_t>(j, "size");
    auto const ops  = field<Json>(j, "operations");
    if (!ops.is_array()) {
      throw ValidationError("'operations' must be an array");
    }
    std::vector<OperationTable> tables;
    for (auto const& o : ops) {
      OperationTable t;
      t.name  = field<std::string>(o, "name");
      t.arity = field<std::size_t>(o, "arity");
      auto raw = field<std::vector<std::int64_t>>(o, "table");
      for (auto x : raw) {
        if (x < 0) {
          throw ValidationError("negative entry in table of '" + t.name + "'");
        }
        t.table.push_back(static_cast<Elem>(x));
      }
      tables.push_back(std::move(t));
    }
    return FiniteAlgebra(name, size, std::move(tables));
  }

  Json algebra_to_json(FiniteAlgebra const& alg) {
    Json ops = Json::array();
    for (auto const& o : alg.operations()) {
      ops.push_back({{"name", o.name}, {"arity", o.arity}, {"table", o.table}});
    }
    return {{"name", alg.name()}, {"size", alg.size()}, {"operations", ops}};
  }

  CubeRelation cubes_from_json(Json const& j, std::size_t carrier) {
    auto const dim    = field<std::size_t>(j, "dimension");
    auto const coords = j.contains("coords")
                            ? field<std::vector<Coord>>(j, "coords")
                            : CubeShape::standard(dim).coords();
    if (coords.size() != dim) {
      throw ValidationError("'coords' must list 'dimension' coordinates");
    }
    CubeShape shape(coords);
    auto      raw = field<std::vector<std::vector<std::int64_t>>>(j, "cubes");
    std::vector<LabeledCube<Elem>> cubes;
    for (auto const& c : raw) {
      std::vector<Elem> labels;
      for (auto x : c) {
        if (x < 0 || static_cast<std::size_t>(x) >= carrier) {
          throw ValidationError("cube label " + std::to_string(x)
                                + " outside the carrier");
        }
        labels.push_back(static_cast<Elem>(x));
      }
      cubes.emplace_back(shape, std::move(labels));
    }
    return CubeRelation::from_cubes(carrier, shape, cubes);
  }

  Json cubes_to_json(CubeRelation const& r) {
    auto cubes = r.cubes();
    std::sort(cubes.begin(), cubes.end());
    Json list = Json::array();
    for (auto const& c : cubes) {
      list.push_back(c.labels);
    }
    return {{"dimension", r.dimension()},
            {"coords", r.shape().coords()},
            {"cubes", list}};
  }

  Json partition_to_json(Partition const& p) { return p.blocks(); }

  Json report_to_json(ClosureReport const& rep) {
    Json phases = Json::array();
    for (auto const& ph : rep.phases) {
      phases.push_back(
          {{"name", ph.name}, {"rounds", ph.rounds}, {"sizes", ph.sizes}});
    }
    std::size_t total = 0;
    std::vector<std::size_t> all;
    for (auto const& ph : rep.phases) {
      total += ph.rounds;
      all.insert(all.end(), ph.sizes.begin(), ph.sizes.end());
    }
    return {{"route", to_string(rep.route)},
            {"rounds", total},
            {"sizes", all},
            {"phases", phases}};
  }

  Json violation_to_json(CentralityViolation const& v) {
    return {{"cube", v.cube.labels},
            {"coords", v.cube.shape.coords()},
            {"direction", v.direction},
            {"delta_pairs", v.delta_pairs},
            {"offending_pair", {v.offending_pair.first, v.offending_pair.second}}};
  }

  Json commutator_to_json(CommutatorResult const& res) {
    Json w = Json::array();
    for (auto const& v : res.witness_trace) {
      w.push_back(violation_to_json(v));
    }
    return {{"kind", to_string(res.kind)},
            {"value", partition_to_json(res.value)},
            {"relation_size", res.relation_size},
            {"witnesses", w}};
  }

  std::string sexpr_list(FreeStore const& store, FreeCube const& c) {
    std::string s = "(";
    for (std::size_t v = 0; v < c.labels.size(); ++v) {
      if (v) {
        s += ", ";
      }
      s += store.to_sexpr(c.labels[v]);
    }
    return s + ")";
  }

  Json free_cube_to_json(FreeStore const& store, FreeCube const& c) {
    Json labels = Json::array();
    for (auto v : c.labels) {
      labels.push_back(store.to_sexpr(v));
    }
    return {{"coords", c.shape.coords()}, {"labels", labels}};
  }

  Json free_violation_to_json(FreeStore const& store, FreeViolation const& v) {
    return {{"cube", free_cube_to_json(store, v.cube)},
            {"direction", v.direction},
            {"delta_pairs", v.delta_pairs},
            {"offending_pair",
             {store.to_sexpr(v.offending_pair.first),
              store.to_sexpr(v.offending_pair.second)}}};
  }

  Json search_to_json(FreeStore const& store, SearchResult const& r) {
    Json j = {{"family", r.family},
              {"k", r.k},
              {"depth", r.depth},
              {"max_leaves", r.max_leaves},
              {"seeds", r.seeds},
              {"leaf_selections", r.leaf_selections},
              {"terms_total", r.terms_total},
              {"terms_evaluated", r.terms_evaluated},
              {"violations", r.violations}};
    j["first_violation"] = r.first_violation
                               ? free_violation_to_json(store, *r.first_violation)
                               : Json(nullptr);
    return j;
  }

  Json witness_report_to_json(FreeStore const& store, WitnessReport const& rep) {
    Json j = {{"family", rep.family},
              {"k", rep.k},
              {"found_tc_violation", rep.found_tc_violation},
              {"polyk_search", search_to_json(store, rep.search)},
              {"ok", rep.ok()}};
    j["tc_violation"] = rep.tc_violation
                            ? free_violation_to_json(store, *rep.tc_violation)
                            : Json(nullptr);
    if (rep.tc_display) {
      j["tc_square_transposed"] = free_cube_to_json(store, *rep.tc_display);
    }
    if (rep.eta) {
      j["eta"] = {{"cube", free_cube_to_json(store, rep.eta->eta)},
                  {"special_vertices", rep.eta->special_vertices}};
    }
    if (rep.hyper) {
      auto const& h     = *rep.hyper;
      j["hyper_witness"] = {
          {"square1", free_cube_to_json(store, h.square1)},
          {"square2", free_cube_to_json(store, h.square2)},
          {"shared_face", free_cube_to_json(store, h.shared_face)},
          {"glued", free_cube_to_json(store, h.glued)},
          {"violation", free_violation_to_json(store, h.violation)}};
    }
    return j;
  }

  Json read_json_file(std::filesystem::path const& path) {
    std::ifstream in(path);
    if (!in) {
      throw ValidationError("cannot open '" + path.string() + "'");
    }
    try {
      return Json::parse(in);
    } catch (Json::parse_error const& e) {
      throw ValidationError("malformed JSON in '" + path.string()
                            + "': " + e.what());
    }
  }

}  // namespace malcev
