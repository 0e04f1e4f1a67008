#include <doctest.h>

#include <httplib.h>

#include <sstream>

#include "msabn/core/annotation.hpp"
#include "msabn/harness/overlay.hpp"
#include "msabn/harness/service.hpp"
#include "support.hpp"

using namespace msabn;
using namespace msabn::harness;

namespace {

struct Fixture {
  test::TempDir dir{"svc"};
  OverlayManifest manifest;
  std::unique_ptr<AnnotationStore> store;
  std::unique_ptr<AnnotationService> service;
  int port = 0;

  Fixture() {
    std::filesystem::create_directories(dir / "overlays");
    const double fracs[] = {0.1, 0.7, 0.4, 0.9};
    const int preds[] = {0, 1, 0, 1};
    for (int i = 0; i < 4; ++i) {
      OverlayEntry e;
      e.sample_id = "s" + std::to_string(i);
      e.image_path = "images/" + e.sample_id + ".png";
      e.overlay_path = "overlays/" + e.sample_id + ".png";
      e.frac_out = fracs[i];
      e.predicted = preds[i];
      e.label = i == 0 ? 1 : preds[i];
      e.width = 20;
      e.height = 10;
      write_png(dir / e.overlay_path, Image(10, 20, 3, static_cast<std::uint8_t>(40 * i)));
      manifest.entries.push_back(e);
    }
    store = std::make_unique<AnnotationStore>(dir / "ann.jsonl");
    service = std::make_unique<AnnotationService>(manifest, dir.path(), *store);
    port = service->start("127.0.0.1", 0);
  }
};

}  // namespace

TEST_CASE("annotation service http api") {
  Fixture f;
  httplib::Client cli("127.0.0.1", f.port);

  SUBCASE("default listing is worst attention first") {
    auto res = cli.Get("/samples");
    REQUIRE(res);
    CHECK(res->status == 200);
    const auto j = nlohmann::json::parse(res->body);
    CHECK(j["total"] == 4);
    CHECK(j["sort"] == "frac_out_desc");
    std::vector<std::string> ids;
    for (const auto& s : j["samples"]) ids.push_back(s["id"]);
    CHECK((ids == std::vector<std::string>{"s3", "s1", "s2", "s0"}));
    CHECK(j["samples"][0]["overlay_url"] == "/samples/s3/overlay");
  }

  SUBCASE("wrong-first ordering and paging") {
    auto res = cli.Get("/samples?sort=wrong_first&page=0&page_size=2");
    REQUIRE(res);
    const auto j = nlohmann::json::parse(res->body);
    REQUIRE(j["samples"].size() == 2);
    CHECK(j["samples"][0]["id"] == "s0");
    CHECK(j["samples"][1]["id"] == "s3");
    auto p1 = nlohmann::json::parse(cli.Get("/samples?page=1&page_size=3")->body);
    CHECK(p1["samples"].size() == 1);
    CHECK(cli.Get("/samples?sort=bogus")->status == 400);
  }

  SUBCASE("overlay bytes") {
    auto res = cli.Get("/samples/s2/overlay");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("Content-Type") == "image/png");
    std::ifstream in(f.dir / "overlays/s2.png", std::ios::binary);
    std::ostringstream b;
    b << in.rdbuf();
    CHECK(res->body == b.str());
    CHECK(cli.Get("/samples/nope/overlay")->status == 404);
  }

  SUBCASE("valid bbox round trip") {
    auto res = cli.Post("/samples/s1/bbox", R"({"x_min":2,"y_min":1,"x_max":12,"y_max":9,"author":"kim"})",
                        "application/json");
    REQUIRE(res);
    CHECK(res->status == 201);
    const auto rec = nlohmann::json::parse(res->body).get<AnnotationRecord>();
    CHECK((rec.bbox == BBox{2, 1, 12, 9}));
    auto dump = cli.Get("/annotations");
    REQUIRE(dump);
    std::istringstream lines(dump->body);
    std::string line;
    std::vector<AnnotationRecord> recs;
    while (std::getline(lines, line))
      if (!line.empty()) recs.push_back(nlohmann::json::parse(line).get<AnnotationRecord>());
    REQUIRE(recs.size() == 1);
    CHECK(recs[0] == rec);
    CHECK(bbox_violation(recs[0].bbox, 20, 10) == std::nullopt);
    const auto listing = nlohmann::json::parse(cli.Get("/samples")->body);
    for (const auto& s : listing["samples"])
      if (s["id"] == "s1") CHECK(s["annotated"] == true);
    // Reload from disk re-validates.
    AnnotationStore reopened(f.dir / "ann.jsonl");
    CHECK((reopened.latest().at("s1").bbox == BBox{2, 1, 12, 9}));
  }

  SUBCASE("invalid boxes are rejected with field messages") {
    auto res = cli.Post("/samples/s1/bbox", R"({"x_min":5,"y_min":1,"x_max":5,"y_max":9})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 422);
    auto j = nlohmann::json::parse(res->body);
    CHECK(j["errors"][0]["field"] == "x_max");
    res = cli.Post("/samples/s1/bbox", R"({"x_min":0,"y_min":0,"x_max":21,"y_max":9})", "application/json");
    CHECK(res->status == 422);
    res = cli.Post("/samples/s1/bbox", R"({"x_min":0,"y_min":0,"x_max":3})", "application/json");
    CHECK(res->status == 422);
    CHECK(nlohmann::json::parse(res->body)["errors"][0]["field"] == "y_max");
    CHECK(cli.Post("/samples/zz/bbox", R"({"x_min":0,"y_min":0,"x_max":1,"y_max":1})", "application/json")->status ==
          404);
    CHECK(cli.Post("/samples/s1/bbox", "not json", "application/json")->status == 400);
    CHECK(f.store->load().empty());
  }
}

TEST_SUITE("overlay") {
  TEST_CASE("zero attention leaves the image unchanged") {
    std::mt19937_64 rng(1);
    const Image img = test::random_image(9, 7, 3, rng);
    CHECK(blend_overlay(img, FloatMap(9, 7, 0.0f)) == img);
    const Image hot = blend_overlay(img, FloatMap(9, 7, 1.0f));
    CHECK(hot.height == 9);
    CHECK(hot.width == 7);
    CHECK(hot != img);
  }

  TEST_CASE("manifest json round trip and ordering") {
    test::TempDir dir("man");
    OverlayManifest m;
    m.entries.push_back({"a", "images/a.png", "overlays/a.png", 0.3, 1, 1, 8, 8, BBox{0, 0, 4, 4}});
    m.entries.push_back({"b", "images/b.png", "overlays/b.png", std::nullopt, 0, 1, 8, 8, std::nullopt});
    m.entries.push_back({"c", "images/c.png", "overlays/c.png", 0.8, 1, 1, 8, 8, std::nullopt});
    write_overlay_manifest(dir / "manifest.json", m);
    const auto r = read_overlay_manifest(dir / "manifest.json");
    REQUIRE(r.entries.size() == 3);
    CHECK((r.entries[0].bbox == BBox{0, 0, 4, 4}));
    CHECK_FALSE(r.entries[1].frac_out);
    auto order = sorted_entries(r, SortOrder::frac_out_desc);
    CHECK(order[0]->sample_id == "c");
    CHECK(order[2]->sample_id == "b");
    order = sorted_entries(r, SortOrder::wrong_first);
    CHECK(order[0]->sample_id == "b");
  }
}
