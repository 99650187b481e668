// Exercises the shared library through its C header only.

#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "attrscope/attrscope.h"
#include "doctest.h"
#include "httplib.h"

namespace fs = std::filesystem;

namespace {

struct Owned {
  char* ptr = nullptr;
  ~Owned() { attrscope_string_free(ptr); }
};

fs::path write_fixture() {
  const auto dir = fs::temp_directory_path() /
                   ("attrscope-capi-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ofstream(dir / "attributes.txt") << "Ring\nHalo\n";
  std::ofstream act(dir / "act.csv");
  std::ofstream prd(dir / "prd.csv");
  std::ofstream fea(dir / "fea.csv");
  act << "image_id,Ring,Halo\n";
  prd << "image_id,Ring,Halo\n";
  fea << "image_id,f0,f1,f2\n";
  for (int i = 0; i < 30; ++i) {
    const int ring = i % 2, halo = i % 3 == 0;
    act << "im" << i << "," << ring << "," << halo << "\n";
    prd << "im" << i << "," << (i % 5 == 0 ? 0.3 : ring * 0.8 + 0.1) << ","
        << (halo ? 0.7 : 0.2) << "\n";
    fea << "im" << i << "," << ring * 5 + 0.01 * i << "," << halo * 3 - 0.02 * i
        << "," << (i % 7) * 0.1 << "\n";
  }
  std::ofstream(dir / "manifest.json")
      << R"({"name":"capi","attributes_file":"attributes.txt","act_file":"act.csv",)"
         R"("prd_file":"prd.csv","fea_file":"fea.csv"})";
  return dir;
}

}  // namespace

TEST_CASE("engine lifecycle and requests") {
  const auto dir = write_fixture();
  attrscope_engine* engine = nullptr;
  REQUIRE(attrscope_engine_create(nullptr, 1, &engine) == ATTRSCOPE_OK);

  Owned summary;
  REQUIRE(attrscope_load_manifest(engine, (dir / "manifest.json").c_str(),
                                  &summary.ptr) == ATTRSCOPE_OK);
  CHECK(std::string(summary.ptr).find("\"records\":30") != std::string::npos);

  int status = 0;
  Owned body;
  REQUIRE(attrscope_request(engine, "GET", "/api/groups/all/metrics", nullptr,
                            &status, &body.ptr) == ATTRSCOPE_OK);
  CHECK(status == 200);
  CHECK(std::string(body.ptr).find("\"rows\"") != std::string::npos);

  Owned err;
  REQUIRE(attrscope_request(engine, "GET", "/api/coexistence/table?k=1", nullptr,
                            &status, &err.ptr) == ATTRSCOPE_OK);
  CHECK(status == 400);

  CHECK(attrscope_load_manifest(engine, "/nonexistent/manifest.json", nullptr) ==
        ATTRSCOPE_ERR_NOT_FOUND);
  CHECK(std::string(attrscope_last_error_slug()) == "file_not_found");
  CHECK(attrscope_request(nullptr, "GET", "/", nullptr, &status, &body.ptr) ==
        ATTRSCOPE_ERR_INVALID_ARGUMENT);

  Owned csv, sidecar;
  REQUIRE(attrscope_embed(engine, R"({"method":"pca","space":"FEA"})", &csv.ptr,
                          &sidecar.ptr) == ATTRSCOPE_OK);
  const std::string csv_text = csv.ptr;
  CHECK(csv_text.rfind("image_id,x,y\n", 0) == 0);
  CHECK(std::string(sidecar.ptr).find("explained_variance") != std::string::npos);

  Owned labels, scores;
  REQUIRE(attrscope_cluster_csv(csv_text.c_str(), "im0\nim1\nim2\nim3\nim4\nim5\n",
                                R"({"method":"kmeans","k":2,"seed":3})", &labels.ptr,
                                &scores.ptr) == ATTRSCOPE_OK);
  CHECK(std::string(labels.ptr).rfind("image_id,label\nim0,", 0) == 0);
  CHECK(std::string(scores.ptr).find("\"k_found\":2") != std::string::npos);

  CHECK(attrscope_cluster_csv(csv_text.c_str(), "im0\nim1\n", R"({"k":3})", nullptr,
                              nullptr) == ATTRSCOPE_ERR_VALIDATION);
  CHECK(std::string(attrscope_last_error_slug()) == "invalid_k");
  CHECK(attrscope_cluster_csv(csv_text.c_str(), "zzz\n", nullptr, nullptr, nullptr) ==
        ATTRSCOPE_ERR_VALIDATION);

  attrscope_engine_destroy(engine);
  fs::remove_all(dir);
}

TEST_CASE("serve and stop") {
  const auto dir = write_fixture();
  attrscope_engine* engine = nullptr;
  REQUIRE(attrscope_engine_create(nullptr, 0, &engine) == ATTRSCOPE_OK);
  REQUIRE(attrscope_load_manifest(engine, (dir / "manifest.json").c_str(), nullptr) ==
          ATTRSCOPE_OK);
  volatile int port = 0;
  attrscope_status served = ATTRSCOPE_ERR_INTERNAL;
  std::thread t([&] { served = attrscope_serve(engine, "127.0.0.1", 0, &port); });
  for (int i = 0; i < 200 && port == 0; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  REQUIRE(port > 0);
  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/api/dataset");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body.find("\"name\":\"capi\"") != std::string::npos);
  attrscope_stop(engine);
  t.join();
  CHECK(served == ATTRSCOPE_OK);
  attrscope_engine_destroy(engine);
  fs::remove_all(dir);
}
