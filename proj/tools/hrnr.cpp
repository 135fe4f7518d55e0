#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hrnr/commands.hpp"

namespace {

// 0 ok, 1 other failure, 2 parse, 3 hypothesis, 4 non-convergence.
int run(const std::function<std::string()>& body, const std::string& out_path) {
  try {
    const std::string text = body();
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) {
        std::cerr << "error: cannot write '" << out_path << "'\n";
        return 1;
      }
      f << text;
    }
    return 0;
  } catch (const hrnr::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const hrnr::HypothesisError& e) {
    std::cerr << "hypothesis violated: " << e.what() << '\n';
    return 3;
  } catch (const hrnr::NoConvergence& e) {
    std::cerr << "no convergence: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher rank numerical ranges of nonnegative matrices and Perron polynomials"};
  app.require_subcommand(1);

  hrnr::cli::Options opt;
  std::string format = "json";
  std::string out;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("input", opt.input, "fixture name or matrix file")->required();
    sub->add_option("--out", out, "output file (default stdout)");
  };

  auto* structure = app.add_subcommand("structure", "irreducibility, index of imprimitivity, cyclic blocks");
  add_common(structure);

  auto* range = app.add_subcommand("range", "rank-k numerical ranges Lambda_1 .. Lambda_k");
  add_common(range);
  range->add_option("--k", opt.k, "largest rank")->check(CLI::PositiveNumber);
  range->add_option("--samples", opt.samples, "support directions")->check(CLI::Range(16, 1 << 20));
  range->add_option("--tolerance", opt.tolerance, "tolerance for membership and invariance checks");
  range->add_option("--format", format, "json, csv or svg")->check(CLI::IsMember({"json", "csv", "svg"}));
  range->add_flag("--timings", opt.timings, "include wall-clock timings in JSON");

  auto* poly = app.add_subcommand("polyrange", "rank-k numerical range of a monic matrix polynomial");
  add_common(poly);
  poly->add_option("--k", opt.k, "rank")->check(CLI::PositiveNumber);
  poly->add_option("--grid", opt.grid, "lattice steps per bounding radius")->check(CLI::PositiveNumber);
  poly->add_option("--samples", opt.poly_samples, "directions per lattice point")->check(CLI::Range(16, 1 << 16));
  poly->add_option("--format", format, "json, csv or svg")->check(CLI::IsMember({"json", "csv", "svg"}));
  poly->add_flag("--timings", opt.timings, "include wall-clock timings in JSON");

  auto* verify = app.add_subcommand("verify", "run the invariant suite on a matrix");
  add_common(verify);
  verify->add_option("--k", opt.k, "largest rank")->check(CLI::PositiveNumber);
  verify->add_option("--samples", opt.samples, "support directions")->check(CLI::Range(16, 1 << 20));
  verify->add_option("--tolerance", opt.tolerance, "invariance tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  opt.format = hrnr::cli::parse_format(format);

  if (structure->parsed()) return run([&] { return hrnr::cli::cmd_structure(opt); }, out);
  if (range->parsed()) return run([&] { return hrnr::cli::cmd_range(opt); }, out);
  if (poly->parsed()) return run([&] { return hrnr::cli::cmd_polyrange(opt); }, out);

  bool passed = true;
  const int code = run(
      [&] {
        auto r = hrnr::cli::cmd_verify(opt);
        passed = r.passed;
        return r.report;
      },
      out);
  if (code != 0) return code;
  return passed ? 0 : 1;
}
