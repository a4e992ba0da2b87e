#pragma once

#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "flower/diagnostics.hpp"
#include "flower/driver.hpp"
#include "flower/parser.hpp"
#include "flower/resolver.hpp"
#include "flower/sim.hpp"
#include "flower/transform.hpp"

#ifndef FLOWER_CORPUS_DIR
#define FLOWER_CORPUS_DIR "corpus"
#endif

namespace flower::test {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string corpus_path(const std::string& name) {
  return std::string(FLOWER_CORPUS_DIR) + "/" + name + ".flo";
}

inline Program parse_and_resolve(const std::string& source) {
  Diagnostics diags;
  auto ast = parse_program(source, diags);
  if (!ast) throw std::runtime_error("parse failed: " + diags.render("<test>", false));
  auto program = resolve(*ast, diags);
  if (!program) throw std::runtime_error("resolve failed: " + diags.render("<test>", false));
  return *program;
}

inline Program load_corpus(const std::string& name) {
  return parse_and_resolve(read_file(corpus_path(name)));
}

inline Program load_corpus_resized(const std::string& name, int w, int h) {
  Diagnostics diags;
  auto resized = with_image_size(load_corpus(name), w, h, diags);
  if (!resized) throw std::runtime_error("resize failed: " + diags.render("<test>", false));
  return *resized;
}

inline ImageBuf random_image(int w, int h, std::mt19937& rng) {
  ImageBuf img(w, h);
  std::uniform_int_distribution<int32_t> dist(0, 255);
  for (auto& px : img.data) px = dist(rng);
  return img;
}

inline std::map<std::string, ImageBuf> random_inputs(const Program& program,
                                                     std::mt19937& rng) {
  std::map<std::string, ImageBuf> inputs;
  for (const auto& img : program.images)
    if (img.binding == ImageBinding::HostInput)
      inputs[img.name] = random_image(program.width, program.height, rng);
  return inputs;
}

inline CompiledProgram compile_or_throw(const Program& program,
                                        const PipelineOptions& options = {}) {
  Diagnostics diags;
  auto compiled = compile_pipeline(program, options, diags);
  if (!compiled)
    throw std::runtime_error("pipeline failed: " + diags.render("<test>", false));
  return *compiled;
}

}  // namespace flower::test
