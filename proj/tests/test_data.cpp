#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "helpers.hpp"
#include "ot/image.hpp"

using namespace ot;

namespace {

// Scratch file that cleans up after itself.
struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name)
      : path((std::filesystem::temp_directory_path() /
              ("otaccel_test_" + std::to_string(::getpid()) + "_" + name)).string()) {}
  ~TempFile() { std::remove(path.c_str()); }
  void write(const std::string& text) const {
    std::ofstream os(path, std::ios::binary);
    os << text;
  }
};

Image gradient_image(int w, int h) {
  Image img;
  img.width = w;
  img.height = h;
  img.rgb.resize(static_cast<size_t>(3 * w * h));
  for (int i = 0; i < w * h; ++i) {
    img.rgb[static_cast<size_t>(3 * i) + 0] = static_cast<std::uint8_t>((i * 7) % 256);
    img.rgb[static_cast<size_t>(3 * i) + 1] = static_cast<std::uint8_t>((i * 13) % 256);
    img.rgb[static_cast<size_t>(3 * i) + 2] = static_cast<std::uint8_t>((i * 29) % 256);
  }
  return img;
}

}  // namespace

TEST_SUITE("data") {

TEST_CASE("random stream emits the pinned golden sequence") {
  Rng rng(42);
  CHECK(rng.next_u64() == 15021278609987233951ULL);
  CHECK(rng.next_u64() == 5881210131331364753ULL);
  CHECK(rng.next_u64() == 18149643915985481100ULL);
  CHECK(rng.next_u64() == 12933668939759105464ULL);

  Rng again(42);
  CHECK(again.next_double() == 0.81430514512290986);
  CHECK(again.next_double() == 0.31882104006166112);
  CHECK(again.next_double() == 0.98389416817748876);
  CHECK(again.next_double() == 0.70113559813475557);

  SUBCASE("bounded draws stay in range and degenerate bound is constant") {
    Rng r3(7);
    for (int t = 0; t < 200; ++t) {
      CHECK(r3.next_below(10) < 10);
      CHECK(r3.next_below(1) == 0);
    }
  }
  SUBCASE("distinct seeds decorrelate immediately") {
    Rng a(1), b(2);
    CHECK(a.next_u64() != b.next_u64());
  }
}

TEST_CASE("synthetic instances are normalized, valid, and reproducible") {
  TransportProblem p = synthetic_instance(2, 3, 7);
  validate_problem(p);
  CHECK(p.epsilon == 1.0);

  // Draw order (a, then b, then C row-major) pins every entry.
  CHECK(p.a[0] == doctest::Approx(0.24336794068896006).epsilon(1e-15));
  CHECK(p.a[1] == doctest::Approx(0.75663205931103994).epsilon(1e-15));
  CHECK(p.b[0] == doctest::Approx(0.34033421244616863).epsilon(1e-15));
  CHECK(p.b[1] == doctest::Approx(0.20261838660994794).epsilon(1e-15));
  CHECK(p.b[2] == doctest::Approx(0.45704740094388335).epsilon(1e-15));
  CHECK(p.C(0, 0) == doctest::Approx(0.17316924621916613).epsilon(1e-15));
  CHECK(p.C(0, 1) == doctest::Approx(0.26918070210305545).epsilon(1e-15));
  CHECK(p.C(0, 2) == doctest::Approx(0.12264890040787609).epsilon(1e-15));
  CHECK(p.C(1, 0) == doctest::Approx(0.36527104470311439).epsilon(1e-15));
  CHECK(p.C(1, 1) == doctest::Approx(0.027250157451361733).epsilon(1e-15));
  CHECK(p.C(1, 2) == doctest::Approx(0.042479949115426373).epsilon(1e-15));

  CHECK(std::abs(p.a.sum() - 1.0) <= 1e-12);
  CHECK(std::abs(p.b.sum() - 1.0) <= 1e-12);
  CHECK(std::abs(p.C.sum() - 1.0) <= 1e-12);

  SUBCASE("same seed, same instance, different seed, different instance") {
    TransportProblem q = synthetic_instance(2, 3, 7);
    CHECK((p.C - q.C).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((p.a - q.a).lpNorm<Eigen::Infinity>() == 0.0);
    TransportProblem r = synthetic_instance(2, 3, 8);
    CHECK((p.C - r.C).lpNorm<Eigen::Infinity>() > 0.0);
  }
  SUBCASE("larger shapes validate too") {
    validate_problem(synthetic_instance(100, 50, 1));
  }
  SUBCASE("degenerate shapes are rejected") {
    CHECK_THROWS_AS(synthetic_instance(0, 3, 7), DimensionMismatch);
  }
}

TEST_CASE("with_epsilon restamps both regularization fields") {
  TransportProblem p = with_epsilon(synthetic_instance(3, 3, 1), 0.05);
  CHECK(p.epsilon == 0.05);
  CHECK(p.epsilon_original == 0.05);
  TransportProblem r = rescale_problem(p);
  CHECK(r.epsilon == 1.0);
  CHECK(r.epsilon_original == 0.05);
  CHECK_THROWS_AS(with_epsilon(p, 0.0), OtError);
  CHECK_THROWS_AS(with_epsilon(p, -2.0), OtError);
}

TEST_CASE("pixel sampling without replacement in [0, 1] colors") {
  Image img = gradient_image(2, 2);
  SUBCASE("asking for every pixel permutes the index set") {
    SampledPixels s = sample_pixels(img, 4, 5);
    std::vector<int> sorted = s.indices;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2, 3});
    for (int i = 0; i < 4; ++i) {
      const std::uint8_t* c = img.px(s.indices[static_cast<size_t>(i)]);
      for (int ch = 0; ch < 3; ++ch) {
        CHECK(s.colors.points(i, ch) ==
              doctest::Approx(static_cast<double>(c[ch]) / 255.0).epsilon(1e-15));
      }
    }
  }
  SUBCASE("deterministic per seed") {
    SampledPixels s1 = sample_pixels(img, 3, 11);
    SampledPixels s2 = sample_pixels(img, 3, 11);
    CHECK(s1.indices == s2.indices);
    CHECK((s1.colors.points - s2.colors.points).lpNorm<Eigen::Infinity>() == 0.0);
  }
  SUBCASE("oversampling throws") {
    CHECK_THROWS_AS(sample_pixels(img, 5, 1), ImageTooSmall);
    CHECK_THROWS_AS(sample_pixels(img, 0, 1), OtError);
  }
  SUBCASE("saturated colors map to exactly one") {
    Image white;
    white.width = 2;
    white.height = 1;
    white.rgb.assign(6, 255);
    SampledPixels s = sample_pixels(white, 2, 3);
    CHECK(s.colors.points.minCoeff() == 1.0);
  }
}

TEST_CASE("squared euclidean cost normalizes by its own maximum") {
  PointCloud x, y;
  x.points.resize(2, 3);
  x.points << 0, 0, 0, 1, 1, 1;
  y.points = x.points;
  CostMatrix c = cost_sqeuclidean(x, y);
  CHECK(c.raw_max == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(c.raw_min == 0.0);
  CHECK(c.C(0, 0) == 0.0);
  CHECK(c.C(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c.C(1, 0) == doctest::Approx(1.0).epsilon(1e-15));

  SUBCASE("identical singleton clouds leave a zero matrix untouched") {
    PointCloud z;
    z.points.resize(1, 3);
    z.points << 0.5, 0.25, 0.125;
    CostMatrix cz = cost_sqeuclidean(z, z);
    CHECK(cz.C(0, 0) == 0.0);
    CHECK(cz.raw_max == 0.0);
  }
  SUBCASE("normalized entries live in [0, 1] with max exactly one") {
    Rng rng(19);
    PointCloud u, w;
    u.points.resize(5, 3);
    w.points.resize(4, 3);
    for (Eigen::Index i = 0; i < 5; ++i)
      for (int ch = 0; ch < 3; ++ch) u.points(i, ch) = rng.next_double();
    for (Eigen::Index i = 0; i < 4; ++i)
      for (int ch = 0; ch < 3; ++ch) w.points(i, ch) = rng.next_double();
    CostMatrix cu = cost_sqeuclidean(u, w);
    CHECK(cu.C.minCoeff() >= 0.0);
    CHECK(cu.C.maxCoeff() == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("dimension mismatch throws") {
    PointCloud flat;
    flat.points.resize(2, 2);
    flat.points.setZero();
    CHECK_THROWS_AS(cost_sqeuclidean(x, flat), DimensionMismatch);
  }
}

TEST_CASE("cosine cost under both normalizations") {
  Matrix basis(2, 3);
  basis << 1, 0, 0, 0, 1, 0;

  SUBCASE("min-max stretches the observed range to [0, 1]") {
    CostMatrix c = cost_cosine(basis, basis, CosineNormalization::MinMax);
    CHECK(c.raw_min == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(c.raw_max == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c.C(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(c.C(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("half-range divides 1 - cos by two") {
    Matrix anti(2, 3);
    anti << 1, 0, 0, -1, 0, 0;
    CostMatrix c = cost_cosine(anti, anti, CosineNormalization::HalfRange);
    CHECK(c.C(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(c.C(0, 1) == doctest::Approx(1.0).epsilon(1e-15));  // opposite vectors
    CHECK(c.C(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("a constant cost surface collapses to zero under min-max") {
    Matrix one(1, 3);
    one << 0, 0, 1;
    CostMatrix c = cost_cosine(one, one, CosineNormalization::MinMax);
    CHECK(c.C(0, 0) == 0.0);
  }
  SUBCASE("non-unit rows are rejected") {
    Matrix off(1, 3);
    off << 0.5, 0.5, 0.5;
    CHECK_THROWS_AS(cost_cosine(off, basis), OtError);
  }
}

TEST_CASE("word vector loading") {
  SUBCASE("reads, normalizes, and truncates to n") {
    TempFile f("vec_ok.txt");
    f.write("3 2\nalpha 3 4\nbeta 0 2\ngamma 5 0\n");
    WordVectors wv = load_word_vectors(f.path, 2);
    REQUIRE(wv.words.size() == 2);
    CHECK(wv.words[0] == "alpha");
    CHECK(wv.words[1] == "beta");
    CHECK(wv.vectors(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(wv.vectors(0, 1) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(wv.vectors(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("duplicates keep the first occurrence and later lines fill the quota") {
    TempFile f("vec_dup.txt");
    f.write("4 2\na 1 0\na 9 9\nb 0 1\n");
    WordVectors wv = load_word_vectors(f.path, 2);
    REQUIRE(wv.words.size() == 2);
    CHECK(wv.words[0] == "a");
    CHECK(wv.words[1] == "b");
    CHECK(wv.vectors(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("short vocabularies throw") {
    TempFile f("vec_short.txt");
    f.write("2 2\na 1 0\nb 0 1\n");
    CHECK_THROWS_AS(load_word_vectors(f.path, 3), VocabularyTooSmall);
  }
  SUBCASE("zero vectors throw") {
    TempFile f("vec_zero.txt");
    f.write("1 3\nnull 0 0 0\n");
    CHECK_THROWS_AS(load_word_vectors(f.path, 1), ZeroVector);
  }
  SUBCASE("malformed lines throw") {
    TempFile missing("vec_missing.txt");
    missing.write("1 3\nw 1 2\n");
    CHECK_THROWS_AS(load_word_vectors(missing.path, 1), MalformedLine);
    TempFile extra("vec_extra.txt");
    extra.write("1 2\nw 1 2 3\n");
    CHECK_THROWS_AS(load_word_vectors(extra.path, 1), MalformedLine);
    TempFile header("vec_header.txt");
    header.write("not a header\nw 1 2\n");
    CHECK_THROWS_AS(load_word_vectors(header.path, 1), MalformedLine);
    TempFile empty("vec_empty.txt");
    empty.write("");
    CHECK_THROWS_AS(load_word_vectors(empty.path, 1), MalformedLine);
  }
  SUBCASE("missing file throws") {
    CHECK_THROWS_AS(load_word_vectors("/nonexistent/vectors.txt", 1), IoError);
  }
}

TEST_CASE("dictionary loading filters, deduplicates, and keeps order") {
  WordVectors src, tgt;
  src.words = {"cat", "dog", "fish"};
  tgt.words = {"chat", "chien", "poisson"};
  src.vectors = Matrix::Identity(3, 3);
  tgt.vectors = Matrix::Identity(3, 3);

  SUBCASE("in-vocabulary pairs come back in file order") {
    TempFile f("dict_ok.txt");
    f.write("cat chat\ndog chien\ncat chat\ncat chien\nhorse cheval\n");
    BilingualDictionary d = load_dictionary(f.path, src, tgt);
    REQUIRE(d.pairs.size() == 3);
    CHECK(d.pairs[0] == std::pair<int, int>{0, 0});
    CHECK(d.pairs[1] == std::pair<int, int>{1, 1});
    CHECK(d.pairs[2] == std::pair<int, int>{0, 1});
  }
  SUBCASE("blank lines are skipped, empty files give empty dictionaries") {
    TempFile f("dict_blank.txt");
    f.write("\n\n");
    CHECK(load_dictionary(f.path, src, tgt).pairs.empty());
  }
  SUBCASE("malformed rows throw") {
    TempFile one("dict_one.txt");
    one.write("cat\n");
    CHECK_THROWS_AS(load_dictionary(one.path, src, tgt), MalformedLine);
    TempFile three("dict_three.txt");
    three.write("cat chat extra\n");
    CHECK_THROWS_AS(load_dictionary(three.path, src, tgt), MalformedLine);
  }
}

TEST_CASE("instance CSV round trip is exact") {
  TransportProblem p = with_epsilon(synthetic_instance(3, 4, 99), 0.037);
  TempFile f("instance.csv");
  write_instance_csv(f.path, p);
  TransportProblem q = read_instance_csv(f.path);
  CHECK(q.n() == 3);
  CHECK(q.m() == 4);
  CHECK(q.epsilon == p.epsilon);
  CHECK((q.a - p.a).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((q.b - p.b).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((q.C - p.C).lpNorm<Eigen::Infinity>() == 0.0);

  SUBCASE("bad header is refused") {
    TempFile g("instance_bad.csv");
    g.write("nope\n");
    CHECK_THROWS_AS(read_instance_csv(g.path), MalformedLine);
  }
  SUBCASE("missing fields are refused") {
    TempFile g("instance_missing.csv");
    g.write("name,index,value\nn,0,2\n");
    CHECK_THROWS_AS(read_instance_csv(g.path), MalformedLine);
  }
  SUBCASE("out-of-order entries are refused") {
    TempFile g("instance_order.csv");
    g.write("name,index,value\nn,0,1\nm,0,1\nepsilon,0,1\na,1,1\n");
    CHECK_THROWS_AS(read_instance_csv(g.path), MalformedLine);
  }
}

}  // TEST_SUITE

TEST_SUITE("image") {

TEST_CASE("binary PPM round trip preserves every byte") {
  Image img = gradient_image(5, 3);
  TempFile f("roundtrip.ppm");
  save_ppm(f.path, img);
  Image back = load_image(f.path);
  CHECK(back.width == 5);
  CHECK(back.height == 3);
  CHECK(back.rgb == img.rgb);
}

TEST_CASE("PNG round trip preserves every byte") {
  Image img = gradient_image(7, 4);
  TempFile f("roundtrip.png");
  save_png(f.path, img);
  Image back = load_image(f.path);
  CHECK(back.width == 7);
  CHECK(back.height == 4);
  CHECK(back.rgb == img.rgb);
}

TEST_CASE("ascii PPM with comments and a small maxval rescales to 255") {
  TempFile f("ascii.ppm");
  f.write("P3\n# comment line\n2 1\n15\n15 0 0  0 15 0\n");
  Image img = load_image(f.path);
  REQUIRE(img.pixel_count() == 2);
  CHECK(img.rgb[0] == 255);
  CHECK(img.rgb[1] == 0);
  CHECK(img.rgb[4] == 255);

  SUBCASE("samples above maxval are rejected") {
    TempFile g("ascii_over.ppm");
    g.write("P3\n1 1\n15\n16 0 0\n");
    CHECK_THROWS_AS(load_image(g.path), IoError);
  }
}

TEST_CASE("unknown formats and missing files are refused") {
  TempFile f("not_an_image.bin");
  f.write("garbage content");
  CHECK_THROWS_AS(load_image(f.path), IoError);
  CHECK_THROWS_AS(load_image("/nonexistent/image.png"), IoError);
}

}  // TEST_SUITE
