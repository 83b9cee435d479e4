#include <catch_amalgamated.hpp>

#include <json.hpp>
#include <sstream>

#include "laxkit/cli/cli.hpp"

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = laxkit::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

bool contains(const std::string& s, std::string_view part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("linearize", "[cli]") {
  const auto r = run({"linearize", "--eq", "kdv"});
  CHECK(r.code == 0);
  CHECK(r.out == "v_t = u*v_x + u_x*v + v_xxx\n");
  // a linear equation linearizes to itself, renamed
  CHECK(run({"linearize", "--eq", "u_t = u_xx + 3*u"}).out == "v_t = v_xx + 3*v\n");
}

TEST_CASE("exit codes", "[cli]") {
  CHECK(run({"verify-manifold", "--manifold", "kdv/p3"}).code == 0);
  CHECK(run({"verify-gcs", "--manifold", "sto/p3-7"}).code == 0);
  CHECK(run({"verify-laxpair", "--manifold", "heat/p2"}).code == 0);

  const auto refuted = run({"verify-manifold", "--manifold", "kdv/p3", "--eq", "mkdv"});
  CHECK(refuted.code == 1);
  CHECK(contains(refuted.out, "Refuted"));
  CHECK(contains(refuted.out, "v_xx"));

  const auto gated = run({"search", "--eq", "kdv", "--p", "9"});
  CHECK(gated.code == 2);
  CHECK(contains(gated.err, "2n+1 = 7"));
  CHECK(run({"linearize", "--eq", "kdv", "--bogus"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"verify-manifold", "--manifold", "no/such"}).code == 2);
  CHECK(run({"linearize", "--eq", "u_t = u_xx +"}).code == 2);
  CHECK(run({"--format", "yaml", "linearize", "--eq", "kdv"}).code == 2);

  // undecidable numerically: not a refutation
  const auto degenerate = run({"spotcheck", "--expr", "1/(u - u)"});
  CHECK(degenerate.code == 3);
  CHECK(contains(degenerate.err, "spot check failed"));
}

TEST_CASE("output is reproducible", "[cli]") {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"--format", "json", "verify-manifold", "--manifold", "sto/p3-5", "--spotcheck"},
        std::vector<std::string>{"determining-system", "--eq", "kdv", "--p", "3", "--s", "2"},
        std::vector<std::string>{"corpus", "run", "--entry", "kdv"},
        std::vector<std::string>{"--seed", "7", "spotcheck", "--expr", "u_x*u_xx"}}) {
    const auto a = run(args), b = run(args);
    INFO(args.front() << " " << args.back());
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
    CHECK_FALSE(a.out.empty());
  }
}

TEST_CASE("json and latex output", "[cli]") {
  const auto j = run({"--format", "json", "verify-manifold", "--manifold", "kdv/p3", "--eq", "mkdv"});
  CHECK(j.code == 1);
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(doc.at("status") == "Refuted");
  CHECK(doc.at("witness") == "v_xx");
  CHECK(doc.at("subject") == "kdv/p3");
  CHECK(doc.at("schema_version") == 1);
  CHECK_FALSE(doc.contains("elapsed_seconds"));

  const auto timed = run({"--format", "json", "--timing", "verify-manifold", "--manifold", "kdv/p3"});
  CHECK(nlohmann::json::parse(timed.out).contains("elapsed_seconds"));

  const auto s = run({"--format", "json", "search", "--eq", "heat", "--p", "2"});
  CHECK(s.code == 0);
  CHECK(nlohmann::json::parse(s.out).at("orders").at(0).at("outcome") == "Solved");

  const auto d = run({"--format", "json", "determining-system", "--eq", "kdv", "--p", "3", "--s", "2"});
  CHECK(nlohmann::json::parse(d.out).at("p") == 3);

  const auto tex = run({"--format", "latex", "verify-manifold", "--manifold", "kdv/p3"});
  CHECK(tex.code == 0);
  CHECK(contains(tex.out, "H^{3} ="));
  CHECK(contains(tex.out, "\\lambda"));
}

TEST_CASE("search modes", "[cli]") {
  const auto scan = run({"search", "--eq", "kdv", "--p", "5", "--scan"});
  CHECK(scan.code == 1);
  CHECK(contains(scan.out, "u[6]*v"));
  CHECK(run({"search", "--eq", "kdv", "--p", "4", "--s", "3", "--scan"}).code == 0);

  const auto top = run({"search", "--eq", "u_t = u_xx^2", "--p", "7", "--top-term"});
  CHECK(top.code == 0);
  CHECK(contains(top.out, "70"));
}

TEST_CASE("corpus commands", "[cli]") {
  const auto list = run({"corpus", "list"});
  CHECK(list.code == 0);
  for (const char* id : {"kdv/p3", "kdv/p4", "mkdv/p4-1", "sto/p3-7", "heat/p2"}) CHECK(contains(list.out, id));

  const auto all = run({"corpus", "run", "--variants"});
  CHECK(all.code == 0);
  CHECK(contains(all.out, "p3-1-as-printed"));

  const auto exported = run({"corpus", "export", "--entry", "heat"});
  CHECK(exported.code == 0);
  CHECK(contains(exported.out, "equation:"));
}

TEST_CASE("extra parameters for inline text", "[cli]") {
  CHECK(run({"spotcheck", "--expr", "mu*u_x"}).code == 2);
  CHECK(run({"spotcheck", "--param", "mu", "--expr", "mu*u_x - u_x*mu"}).code == 0);
  const auto lin = run({"--param", "k", "linearize", "--eq", "u_t = k*u*u_x + u_xxx"});
  CHECK(lin.code == 0);
  CHECK(lin.out == "v_t = k*u*v_x + k*u_x*v + v_xxx\n");
}

TEST_CASE("spotcheck command", "[cli]") {
  const auto zero = run({"spotcheck", "--expr", "(u + 1)^2 - u^2 - 2*u - 1"});
  CHECK(zero.code == 0);
  CHECK(contains(zero.out, "zero"));
  const auto nonzero = run({"spotcheck", "--expr", "u_x*u_xx", "--trials", "3"});
  CHECK(nonzero.code == 1);
  CHECK(contains(nonzero.out, "nonzero (3 trials"));
}
