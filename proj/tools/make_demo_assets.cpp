// Writes a self-contained demo asset tree (procedural body, garments,
// textures, room, animation) plus ready-to-run DR and SDR configs.

#include <CLI11.hpp>

#include <cstdio>

#include "medsynth/fixtures.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write procedural demo assets for the medsynth CLI"};
  std::string out_dir = "assets";
  medsynth::DemoAssetOptions opt;
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--image-size", opt.image_size, "camera resolution in the configs");
  app.add_option("--seed", opt.seed, "texture/shape seed");
  CLI11_PARSE(app, argc, argv);

  try {
    auto assets = medsynth::write_demo_assets(out_dir, opt);
    std::printf("wrote %s and %s\n", assets.dr_config.string().c_str(),
                assets.sdr_config.string().c_str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
