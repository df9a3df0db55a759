#include <random>

#include "doctest.h"
#include "support.hpp"

using namespace malcev;
using namespace malcev::testing;

namespace {

  LabeledCube<Elem> cube_of(std::vector<Coord> coords, std::vector<Elem> l) {
    return LabeledCube<Elem>(CubeShape(std::move(coords)), std::move(l));
  }

  std::vector<std::vector<Coord>> subsets(CubeShape const& s) {
    std::vector<std::vector<Coord>> out;
    auto const& cs = s.coords();
    for (std::size_t m = 0; m < (std::size_t(1) << cs.size()); ++m) {
      std::vector<Coord> q;
      for (std::size_t p = 0; p < cs.size(); ++p) {
        if ((m >> p) & 1) {
          q.push_back(cs[p]);
        }
      }
      out.push_back(q);
    }
    return out;
  }

  std::vector<CubeShape> shapes_up_to_3() {
    return {CubeShape({0}),    CubeShape({2}),       CubeShape({0, 1}),
            CubeShape({1, 4}), CubeShape({0, 1, 2}), CubeShape({0, 3, 5})};
  }

  LabeledCube<Elem> random_cube_of(std::mt19937& rng, CubeShape const& s,
                                   std::size_t n) {
    return LabeledCube<Elem>(s, random_cube(rng, n, s.dimension()));
  }

}  // namespace

TEST_CASE("shapes validate their coordinates") {
  CHECK_THROWS_AS(CubeShape({1, 1}), ValidationError);
  CHECK_THROWS_AS(CubeShape({2, 1}), ValidationError);
  CHECK_THROWS_AS(cube_of({0, 1}, {0, 1, 2}), ValidationError);
  CubeShape s({1, 4, 6});
  CHECK(s.position(4) == 1);
  CHECK_THROWS_AS(s.position(5), ValidationError);
  CHECK(s.without({4}) == CubeShape({1, 6}));
  CHECK(s.max_coord() == 6);
}

TEST_CASE("faces and lines of a square") {
  // Vertex index: bit 0 is the first coordinate.
  auto g = cube_of({1, 4}, {10, 11, 12, 13});
  auto [f0, f1] = faces(g, 1);
  CHECK(f0 == cube_of({4}, {10, 12}));
  CHECK(f1 == cube_of({4}, {11, 13}));
  auto [h0, h1] = faces(g, 4);
  CHECK(h0 == cube_of({1}, {10, 11}));
  CHECK(h1 == cube_of({1}, {12, 13}));
  auto l = lines(g, 1);
  CHECK(l.shape == CubeShape({4}));
  CHECK(l.labels == std::vector<std::pair<Elem, Elem>>{{10, 11}, {12, 13}});
  auto m = lines(g, 4);
  CHECK(m.labels == std::vector<std::pair<Elem, Elem>>{{10, 12}, {11, 13}});
  CHECK_THROWS_AS(faces(g, 0), ValidationError);
}

TEST_CASE("cut then glue is the identity for every coordinate set") {
  std::mt19937 rng(7);
  for (auto const& s : shapes_up_to_3()) {
    for (int rep = 0; rep < 5; ++rep) {
      auto g = random_cube_of(rng, s, 5);
      for (auto const& q : subsets(s)) {
        if (q.empty() || q.size() == s.dimension()) {
          continue;  // outer or inner cube would be 0-dimensional
        }
        auto c = cut(g, q);
        CHECK(c.shape == CubeShape(q));
        CHECK(c.labels.front().shape == s.without(q));
        CHECK(glue(c) == g);
      }
    }
  }
}

TEST_CASE("cut selects the sub-cube at each outer vertex") {
  auto g = cube_of({0, 1, 2}, {0, 1, 2, 3, 4, 5, 6, 7});
  auto c = cut(g, {0, 2});
  // Outer vertex (f_0, f_2) = (1, 0) is index 1; inner coordinate 1.
  CHECK(c.labels[1] == cube_of({1}, {1, 3}));
  CHECK(c.labels[2] == cube_of({1}, {4, 6}));
}

TEST_CASE("faces glue back and shared faces compose") {
  std::mt19937 rng(11);
  for (auto const& s : shapes_up_to_3()) {
    if (s.dimension() < 2) {
      continue;
    }
    for (Coord i : s.coords()) {
      auto g        = random_cube_of(rng, s, 4);
      auto [f0, f1] = faces(g, i);
      CHECK(glue_faces(f0, f1, i) == g);
      // Two cubes sharing a face glue to the cube of their outer faces.
      auto f2 = random_cube_of(rng, f0.shape, 4);
      auto a  = glue_faces(f0, f1, i);
      auto b  = glue_faces(f1, f2, i);
      CHECK(faces(a, i).second == faces(b, i).first);
      auto composed = glue_faces(faces(a, i).first, faces(b, i).second, i);
      CHECK(faces(composed, i).first == f0);
      CHECK(faces(composed, i).second == f2);
    }
  }
}

TEST_CASE("refl and sym match the bit formulas") {
  std::mt19937 rng(3);
  for (std::size_t k = 1; k <= 3; ++k) {
    auto s = CubeShape::standard(k);
    for (int rep = 0; rep < 10; ++rep) {
      auto g = random_cube_of(rng, s, 6);
      for (Coord i = 0; i < k; ++i) {
        CHECK(sym(g, i).labels == naive_sym(g.labels, i));
        CHECK(refl(g, i, 0).labels == naive_refl(g.labels, i, 0));
        CHECK(refl(g, i, 1).labels == naive_refl(g.labels, i, 1));
        CHECK(sym(sym(g, i), i) == g);
        auto [r0, r1] = faces(refl(g, i, 0), i);
        CHECK(r0 == r1);
        CHECK(r0 == faces(g, i).first);
      }
    }
  }
  auto g = cube_of({0, 1}, {1, 2, 3, 4});
  CHECK(refl(g, 0, 1).labels == std::vector<Elem>{2, 2, 4, 4});
  CHECK(sym(g, 1).labels == std::vector<Elem>{3, 4, 1, 2});
  CHECK_THROWS_AS(refl(g, 0, 2), ValidationError);
}

TEST_CASE("generator cubes") {
  auto s = CubeShape::standard(3);
  auto c = cube_from_pair<Elem>(s, 1, 5, 6);
  CHECK(c.labels == std::vector<Elem>{5, 5, 6, 6, 5, 5, 6, 6});
  CHECK(constant_cube<Elem>(s, 2).is_constant());
  CHECK_FALSE(c.is_constant());
}

TEST_CASE("coordinate permutations") {
  auto g = cube_of({0, 1}, {1, 2, 3, 4});
  CHECK(transpose(g, 0, 1).labels == std::vector<Elem>{1, 3, 2, 4});
  std::mt19937 rng(5);
  auto         s = CubeShape::standard(3);
  for (int rep = 0; rep < 10; ++rep) {
    auto h = random_cube_of(rng, s, 5);
    CHECK(transpose(transpose(h, 0, 2), 0, 2) == h);
    // A 3-cycle applied three times is the identity.
    std::map<Coord, Coord> cyc{{0, 1}, {1, 2}, {2, 0}};
    CHECK(permute_coords(permute_coords(permute_coords(h, cyc), cyc), cyc) == h);
    // Label at f is h at f o pi.
    auto p = permute_coords(h, cyc);
    for (std::size_t f = 0; f < 8; ++f) {
      std::size_t src = 0;
      for (Coord c = 0; c < 3; ++c) {
        src |= ((f >> cyc[c]) & 1) << c;
      }
      CHECK(p.labels[f] == h.labels[src]);
    }
    // Transposing directions moves lines with them.
    auto t = transpose(h, 0, 2);
    CHECK(lines(t, 2).labels.size() == lines(h, 0).labels.size());
    auto lt = lines(t, 2).labels;
    auto lh = lines(h, 0).labels;
    std::sort(lt.begin(), lt.end());
    std::sort(lh.begin(), lh.end());
    CHECK(lt == lh);
  }
  CHECK_THROWS_AS(permute_coords(g, {{0, 0}, {1, 0}}), ValidationError);
  CHECK_THROWS_AS(permute_coords(g, {{0, 1}}), ValidationError);
}

TEST_CASE("rectangular complexes: cells and corners") {
  // 3 x 2 complex with labels equal to their storage index.
  RectComplex<Elem> c({3, 2}, {0, 1, 2, 3, 4, 5});
  std::vector<std::size_t> f{1, 0};
  CHECK(cell(c, f).labels == std::vector<Elem>{1, 2, 4, 5});
  CHECK(corners(c).labels == std::vector<Elem>{0, 2, 3, 5});
  std::vector<std::size_t> out{2, 0};
  CHECK_THROWS_AS(cell(c, out), ValidationError);
  CHECK_THROWS_AS(RectComplex<Elem>({1, 2}, {0, 1}), ValidationError);
  CHECK_THROWS_AS(RectComplex<Elem>({2, 2}, {0, 1}), ValidationError);
  // A 2 x ... x 2 complex is a cube.
  std::mt19937 rng(1);
  auto         g = random_cube(rng, 4, 3);
  RectComplex<Elem> unit({2, 2, 2}, g);
  CHECK(corners(unit).labels == g);
}

TEST_CASE("expand_zeta cells depend only on the threshold") {
  std::mt19937 rng(13);
  for (std::size_t k = 1; k <= 3; ++k) {
    for (std::size_t n = 1; n <= 4; ++n) {
      auto a = random_cube_of(rng, CubeShape::standard(k), 6);
      for (std::size_t i = 0; i < n; ++i) {
        auto z = expand_zeta(a, i, n);
        CHECK(z.dims == std::vector<std::size_t>(k, n + 1));
        CHECK(corners(z) == a);
        // Every cell at offset f: vertex v carries a at (f_j + v_j > i).
        std::size_t total = 1;
        for (std::size_t j = 0; j < k; ++j) {
          total *= n;
        }
        for (std::size_t idx = 0; idx < total; ++idx) {
          std::vector<std::size_t> f(k);
          std::size_t              rest = idx;
          for (std::size_t j = 0; j < k; ++j) {
            f[j] = rest % n;
            rest /= n;
          }
          auto cl = cell(z, f);
          for (std::size_t v = 0; v < cl.labels.size(); ++v) {
            std::size_t w = 0;
            for (std::size_t j = 0; j < k; ++j) {
              w |= std::size_t(f[j] + ((v >> j) & 1) > i) << j;
            }
            CHECK(cl.labels[v] == a.labels[w]);
          }
          // The cell at the diagonal offset i is a itself.
          if (std::all_of(f.begin(), f.end(),
                          [&](std::size_t x) { return x == i; })) {
            CHECK(cl == a);
          }
        }
      }
    }
  }
}

TEST_CASE("vertexwise operations commute with cells and corners") {
  auto         alg = corpus("groupoid3_seed1");
  std::mt19937 rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<std::size_t> dims{3, 4};
    std::vector<Elem>        l1(12), l2(12);
    for (auto& x : l1) {
      x = rng() % 3;
    }
    for (auto& x : l2) {
      x = rng() % 3;
    }
    std::vector<RectComplex<Elem>> cs{RectComplex<Elem>(dims, l1),
                                      RectComplex<Elem>(dims, l2)};
    auto                           img = apply_op_to_complexes(alg, "mul", cs);
    std::vector<LabeledCube<Elem>> cn{corners(cs[0]), corners(cs[1])};
    CHECK(corners(img)
          == apply_op_to_cubes(alg, "mul", cn, CubeShape::standard(2)));
    for (std::size_t a = 0; a + 1 < 3; ++a) {
      for (std::size_t b = 0; b + 1 < 4; ++b) {
        std::vector<std::size_t>       f{a, b};
        std::vector<LabeledCube<Elem>> cl{cell(cs[0], f), cell(cs[1], f)};
        CHECK(cell(img, f)
              == apply_op_to_cubes(alg, "mul", cl, CubeShape::standard(2)));
      }
    }
  }
  std::vector<LabeledCube<Elem>> one{constant_cube<Elem>(CubeShape::standard(2), 0)};
  CHECK_THROWS_AS(apply_op_to_cubes(alg, "mul", one, CubeShape::standard(2)),
                  ValidationError);
}

TEST_CASE("the cube codec agrees with the labeled operators") {
  std::mt19937 rng(19);
  for (std::size_t k = 1; k <= 3; ++k) {
    auto      s = CubeShape::standard(k);
    CubeCodec codec(4, s);
    for (int rep = 0; rep < 20; ++rep) {
      auto g = random_cube_of(rng, s, 4);
      auto c = codec.encode(g);
      CHECK(codec.cube(c) == g);
      for (std::size_t p = 0; p < k; ++p) {
        CHECK(codec.cube(codec.sym(c, p)) == sym(g, static_cast<Coord>(p)));
        CHECK(codec.cube(codec.refl(c, p, 1)) == refl(g, static_cast<Coord>(p), 1));
        auto f0 = codec.face(c, p, 0);
        auto f1 = codec.face(c, p, 1);
        CHECK(codec.glue(f0, f1, p) == c);
      }
    }
  }
}
