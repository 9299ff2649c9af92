#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bindsig/enumerate.hpp"
#include "bindsig/examples.hpp"
#include "bindsig/laws.hpp"
#include "bindsig/sexpr.hpp"
#include "bindsig/signature.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitLawFailure = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitCapExceeded = 3;
constexpr int kExitUnknownRep = 4;

constexpr int kDefaultDepthCap = 8;
constexpr std::size_t kDefaultItemCap = 100000;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bindsig::Signature load_signature(const std::string& path) {
  bindsig::Signature sig = bindsig::parse_signature_text(read_file(path));
  bindsig::ValidationReport report = bindsig::validate_signature(sig);
  if (!report.ok()) {
    for (const std::string& e : report.errors) std::cerr << "error: " << e << "\n";
    throw bindsig::ParseError("invalid signature", 0);
  }
  return sig;
}

struct CheckOptions {
  std::string sig_path;
  int ctx_max = 3;
  int depth_max = 5;
  std::uint64_t samples = 1000;
  std::uint64_t seed = 0;
  std::string format = "pretty";
};

int run_check(const CheckOptions& opt) {
  bindsig::Signature sig = load_signature(opt.sig_path);
  bindsig::Bounds bounds;
  bounds.ctx_max = opt.ctx_max;
  bounds.depth_max = opt.depth_max;
  bounds.samples = opt.samples;
  std::vector<bindsig::EvalReport> reports = bindsig::run_all_laws(sig, bounds, opt.seed);
  bool all_pass = true;
  for (const bindsig::EvalReport& r : reports) {
    std::cout << (opt.format == "sexpr" ? bindsig::format_report_sexpr(r)
                                        : bindsig::format_report_line(r))
              << "\n";
    if (!r.passed()) {
      all_pass = false;
      for (const bindsig::Failure& f : r.failures) {
        std::cerr << "counterexample (" << r.law_id << "): " << f.description << "\n";
        if (!f.term.empty()) std::cerr << "  term: " << f.term << "\n";
        if (!f.substitution.empty()) std::cerr << "  substitution: " << f.substitution << "\n";
        if (!f.lhs.empty()) std::cerr << "  lhs: " << f.lhs << "\n";
        if (!f.rhs.empty()) std::cerr << "  rhs: " << f.rhs << "\n";
        std::cerr << "  replay seed: " << f.replay_seed << "\n";
      }
    }
  }
  return all_pass ? kExitOk : kExitLawFailure;
}

struct EnumOptions {
  std::string sig_path;
  int ctx = 0;
  int depth = 0;
  std::size_t cap = kDefaultItemCap;
  int depth_cap = kDefaultDepthCap;
};

int run_enum(const EnumOptions& opt) {
  bindsig::Signature sig = load_signature(opt.sig_path);
  if (opt.depth > opt.depth_cap) {
    std::cerr << "error: depth " << opt.depth << " exceeds the cap of " << opt.depth_cap
              << " (raise with --max-depth)\n";
    return kExitCapExceeded;
  }
  std::vector<bindsig::Term> terms =
      bindsig::enumerate_terms(sig, opt.ctx, opt.depth, bindsig::EnumLimits{opt.cap});
  for (const bindsig::Term& t : terms) std::cout << bindsig::print_term(t) << "\n";
  std::cout << "count: " << terms.size() << "\n";
  return kExitOk;
}

struct EvalOptions {
  std::string sig_path;
  std::string term_path;
  std::string rep = "self";
  int ctx = 0;
};

int run_eval(const EvalOptions& opt) {
  bindsig::Signature sig = load_signature(opt.sig_path);
  std::optional<bindsig::RepRunner> runner = bindsig::find_representation(opt.rep);
  if (!runner) {
    std::cerr << "error: unknown representation: " << opt.rep << " (known:";
    for (const std::string& n : bindsig::representation_names()) std::cerr << ' ' << n;
    std::cerr << ")\n";
    return kExitUnknownRep;
  }
  bindsig::Term t = bindsig::parse_term(read_file(opt.term_path), sig);
  if (!bindsig::well_formed(t, sig, opt.ctx)) {
    std::cerr << "error: term is not well-formed at context " << opt.ctx << "\n";
    return kExitBadInput;
  }
  std::cout << (*runner)(t, sig, opt.ctx) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"signature-driven syntax engine"};
  app.require_subcommand(1);

  CheckOptions check_opt;
  CLI::App* check = app.add_subcommand("check", "run the law suite over a signature");
  check->add_option("signature", check_opt.sig_path, "signature file")->required();
  check->add_option("-n", check_opt.ctx_max, "max context size for generated terms");
  check->add_option("-d", check_opt.depth_max, "max depth for generated terms");
  check->add_option("--samples", check_opt.samples, "random samples per law");
  check->add_option("--seed", check_opt.seed, "random seed");
  check->add_option("--format", check_opt.format, "report format: pretty|sexpr")
      ->check(CLI::IsMember({"pretty", "sexpr"}));

  EnumOptions enum_opt;
  CLI::App* enumerate = app.add_subcommand("enum", "enumerate well-formed terms");
  enumerate->add_option("signature", enum_opt.sig_path, "signature file")->required();
  enumerate->add_option("-n", enum_opt.ctx, "context size")->required();
  enumerate->add_option("-d", enum_opt.depth, "depth bound");
  enumerate->add_option("--cap", enum_opt.cap, "max number of enumerated values");
  enumerate->add_option("--max-depth", enum_opt.depth_cap, "raise the depth cap");

  EvalOptions eval_opt;
  CLI::App* evaluate = app.add_subcommand("eval", "evaluate a term into a representation");
  evaluate->add_option("signature", eval_opt.sig_path, "signature file")->required();
  evaluate->add_option("term", eval_opt.term_path, "term file (s-expression)")->required();
  evaluate->add_option("--rep", eval_opt.rep, "representation name");
  evaluate->add_option("-n", eval_opt.ctx, "context size of the term");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (check->parsed()) return run_check(check_opt);
    if (enumerate->parsed()) return run_enum(enum_opt);
    if (evaluate->parsed()) return run_eval(eval_opt);
  } catch (const bindsig::CapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCapExceeded;
  } catch (const bindsig::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const bindsig::MissingInterp& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const bindsig::TermError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitOk;
}
