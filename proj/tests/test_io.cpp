#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <vector>

#include "mhaec/config.hpp"
#include "mhaec/csv.hpp"
#include "mhaec/rng.hpp"
#include "mhaec/wav.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / "mhaec_io_test") {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("wav round trip preserves float samples") {
  TempDir tmp;
  mhaec::Rng rng(3);
  std::vector<double> x(4801);
  for (auto& v : x) v = static_cast<float>(rng.gaussian());  // float-representable

  mhaec::write_wav(tmp.file("a.wav"), x, 48000);
  const mhaec::WavData back = mhaec::read_wav(tmp.file("a.wav"));
  REQUIRE(back.sample_rate == 48000);
  REQUIRE(back.samples == x);
}

TEST_CASE("wav reader rejects what the pipeline cannot process") {
  TempDir tmp;

  SECTION("missing file") {
    REQUIRE_THROWS_AS(mhaec::read_wav(tmp.file("missing.wav")), mhaec::io_error);
  }

  SECTION("not a wav") {
    std::ofstream out(tmp.file("junk.wav"), std::ios::binary);
    out << "definitely not audio";
    out.close();
    REQUIRE_THROWS_AS(mhaec::read_wav(tmp.file("junk.wav")), std::invalid_argument);
  }

  SECTION("16-bit PCM is refused with a clear message") {
    // hand-built minimal PCM16 header
    std::string bytes = "RIFF";
    auto u32 = [&](std::uint32_t v) {
      for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    };
    auto u16 = [&](std::uint16_t v) {
      bytes.push_back(static_cast<char>(v & 0xff));
      bytes.push_back(static_cast<char>((v >> 8) & 0xff));
    };
    u32(36 + 4);
    bytes += "WAVEfmt ";
    u32(16);
    u16(1);  // PCM
    u16(1);
    u32(48000);
    u32(96000);
    u16(2);
    u16(16);
    bytes += "data";
    u32(4);
    bytes += std::string(4, '\0');
    std::ofstream out(tmp.file("pcm.wav"), std::ios::binary);
    out << bytes;
    out.close();
    try {
      mhaec::read_wav(tmp.file("pcm.wav"));
      FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
      REQUIRE(std::string(e.what()).find("32-bit float") != std::string::npos);
    }
  }

  SECTION("stereo is refused") {
    TempDir tmp2;
    // write a valid mono file, then patch the channel count
    std::vector<double> x(16, 0.25);
    mhaec::write_wav(tmp2.file("stereo.wav"), x, 48000);
    std::fstream f(tmp2.file("stereo.wav"),
                   std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(22);
    const char two = 2;
    f.write(&two, 1);
    f.close();
    REQUIRE_THROWS_AS(mhaec::read_wav(tmp2.file("stereo.wav")), std::invalid_argument);
  }
}

TEST_CASE("wav writer surfaces I/O failures") {
  std::vector<double> x(8, 0.0);
  REQUIRE_THROWS_AS(mhaec::write_wav("/nonexistent_dir/x.wav", x, 48000), mhaec::io_error);
}

TEST_CASE("csv parse errors carry line numbers") {
  TempDir tmp;

  SECTION("bad stats number") {
    std::ofstream out(tmp.file("bad.csv"));
    out << "frame,P_m,P_s,P_d,U_m,U_s\n";
    out << "469,0.5,0.4,0.1,0,0\n";
    out << "470,0.5,oops,0.1,0,0\n";
    out.close();
    try {
      mhaec::read_stats_csv(tmp.file("bad.csv"));
      FAIL("expected parse error");
    } catch (const std::invalid_argument& e) {
      REQUIRE(std::string(e.what()).find(":3:") != std::string::npos);
    }
  }

  SECTION("wrong field count") {
    std::ofstream out(tmp.file("short.csv"));
    out << "frame,P_m,P_s,P_d,U_m,U_s\n";
    out << "469,0.5,0.4\n";
    out.close();
    REQUIRE_THROWS_AS(mhaec::read_stats_csv(tmp.file("short.csv")), std::invalid_argument);
  }

  SECTION("bad header") {
    std::ofstream out(tmp.file("hdr.csv"));
    out << "frames,P_m,P_s,P_d,U_m,U_s\n";
    out.close();
    REQUIRE_THROWS_AS(mhaec::read_stats_csv(tmp.file("hdr.csv")), std::invalid_argument);
  }

  SECTION("unknown label in features") {
    std::ofstream out(tmp.file("feat.csv"));
    out << "label,seed";
    for (int i = 0; i < 15; ++i) out << ",f" << i;
    out << "\nNotAClass,0";
    for (int i = 0; i < 15; ++i) out << ",0";
    out << "\n";
    out.close();
    try {
      mhaec::read_features_csv(tmp.file("feat.csv"));
      FAIL("expected parse error");
    } catch (const std::invalid_argument& e) {
      REQUIRE(std::string(e.what()).find(":2:") != std::string::npos);
      REQUIRE(std::string(e.what()).find("NotAClass") != std::string::npos);
    }
  }

  SECTION("missing file is an io error") {
    REQUIRE_THROWS_AS(mhaec::read_stats_csv(tmp.file("missing.csv")), mhaec::io_error);
  }
}

TEST_CASE("features csv round trip is exact") {
  TempDir tmp;
  mhaec::Rng rng(8);
  std::vector<mhaec::EventRecord> records;
  for (int i = 0; i < 9; ++i) {
    mhaec::EventRecord r;
    r.label = static_cast<mhaec::EventClass>(i % 4);
    r.seed = rng.next_u64();
    for (double& v : r.features.v) v = rng.gaussian() * 1e-3;
    records.push_back(r);
  }
  mhaec::write_features_csv(tmp.file("f.csv"), records);
  const auto back = mhaec::read_features_csv(tmp.file("f.csv"));
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    REQUIRE(back[i].label == records[i].label);
    REQUIRE(back[i].seed == records[i].seed);
    REQUIRE(back[i].features.v == records[i].features.v);
  }
}

TEST_CASE("manifest csv round trip") {
  TempDir tmp;
  std::vector<mhaec::ManifestRow> rows(3);
  rows[0] = {"000_SteadyState", mhaec::EventClass::SteadyState, 11, "a_ref.wav", "a_mic.wav",
             5.333, 1.0};
  rows[1] = {"001_DoubleTalk", mhaec::EventClass::DoubleTalk, 12, "b_ref.wav", "b_mic.wav",
             5.333, 1.0};
  rows[2] = {"002_Repositioning", mhaec::EventClass::Repositioning, 13, "c_ref.wav",
             "c_mic.wav", 5.0, 0.5};
  mhaec::write_manifest_csv(tmp.file("m.csv"), rows);
  const auto back = mhaec::read_manifest_csv(tmp.file("m.csv"));
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    REQUIRE(back[i].id == rows[i].id);
    REQUIRE(back[i].label == rows[i].label);
    REQUIRE(back[i].seed == rows[i].seed);
    REQUIRE(back[i].path_ref == rows[i].path_ref);
    REQUIRE(back[i].path_mic == rows[i].path_mic);
    REQUIRE(back[i].event_start_s == rows[i].event_start_s);
    REQUIRE(back[i].event_dur_s == rows[i].event_dur_s);
  }
}

TEST_CASE("config file loading") {
  TempDir tmp;

  SECTION("defaults survive an empty object") {
    std::ofstream out(tmp.file("empty.json"));
    out << "{}";
    out.close();
    const mhaec::RunConfig cfg = mhaec::load_config(tmp.file("empty.json"));
    REQUIRE(cfg.sample_rate == 48000);
    REQUIRE(cfg.frame == 512);
    REQUIRE(cfg.bands == 512);
    REQUIRE(cfg.stats_bands == 100);
    REQUIRE(cfg.taps == 20);
    REQUIRE(cfg.t_c == 0.2);
    REQUIRE(cfg.truncate_s == 5.0);
    REQUIRE(cfg.control.copy_threshold_db == 10.0);
    REQUIRE(cfg.control.shadow_to_main_holdover == 2);
    REQUIRE(cfg.control.main_to_shadow_holdover == 5);
    REQUIRE(cfg.control.mu_main == 0.5);
  }

  SECTION("partial override") {
    std::ofstream out(tmp.file("partial.json"));
    out << R"({"stats_bands": 64, "t_c": 0.1, "mu_main": 0.25, "seed": 99})";
    out.close();
    const mhaec::RunConfig cfg = mhaec::load_config(tmp.file("partial.json"));
    REQUIRE(cfg.stats_bands == 64);
    REQUIRE(cfg.t_c == 0.1);
    REQUIRE(cfg.control.mu_main == 0.25);
    REQUIRE(cfg.seed == 99);
    REQUIRE(cfg.frame == 512);  // untouched
  }

  SECTION("invalid JSON") {
    std::ofstream out(tmp.file("broken.json"));
    out << "{ not json";
    out.close();
    REQUIRE_THROWS_AS(mhaec::load_config(tmp.file("broken.json")), std::invalid_argument);
  }

  SECTION("inconsistent values are rejected") {
    std::ofstream out(tmp.file("bad.json"));
    out << R"({"stats_bands": 4096})";
    out.close();
    REQUIRE_THROWS_AS(mhaec::load_config(tmp.file("bad.json")), std::invalid_argument);
  }

  SECTION("missing file") {
    REQUIRE_THROWS_AS(mhaec::load_config(tmp.file("none.json")), mhaec::io_error);
  }
}
