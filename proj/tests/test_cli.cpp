#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

CliResult run_cli(const std::string& args) {
  std::string cmd = std::string("ECOSTITCH_NO_COLOR=1 ") + ECOSTITCH_CLI_BIN + " " + args +
                    " >cli_stdout.txt 2>cli_stderr.txt";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  CliResult res;
  res.exit_code = WEXITSTATUS(status);
  res.out = read_file("cli_stdout.txt");
  res.err = read_file("cli_stderr.txt");
  return res;
}

std::string demo() { return std::string("--corpus ") + ECOSTITCH_DEMO_CORPUS; }

}  // namespace

TEST_CASE("resolve prints members and arcs") {
  CliResult res = run_cli("resolve " + demo() + " --root D:1.0");
  CHECK(res.exit_code == 0);
  CHECK(res.err.empty());
  CHECK(res.out ==
        "resolved D-1.0 (newest): 5 revisions\n"
        "members:\n"
        "  A-1.1\n"
        "  B-1.3\n"
        "  C-1.4\n"
        "  D-1.0\n"
        "  E-1.0\n"
        "arcs:\n"
        "  C-1.4 -> A-1.1\n"
        "  C-1.4 -> B-1.3\n"
        "  D-1.0 -> B-1.3\n"
        "  D-1.0 -> C-1.4\n"
        "  D-1.0 -> E-1.0\n"
        "  E-1.0 -> A-1.1\n");
}

TEST_CASE("structured output is one record per line") {
  CliResult res = run_cli("resolve " + demo() + " --root D:1.0 --format structured");
  CHECK(res.exit_code == 0);
  CHECK(res.out ==
        R"({"record":"resolution","root":"D-1.0","strategy":"newest","members":["A-1.1","B-1.3",)"
        R"("C-1.4","D-1.0","E-1.0"],"arcs":[["C-1.4","A-1.1"],["C-1.4","B-1.3"],["D-1.0","B-1.3"],)"
        R"(["D-1.0","C-1.4"],["D-1.0","E-1.0"],["E-1.0","A-1.1"]]})"
        "\n");

  CliResult verify = run_cli("verify " + demo() + " --root D:1.0 --format structured");
  CHECK(verify.exit_code == 0);
  CHECK(verify.out ==
        R"({"record":"verification","root":"D-1.0","rootPresent":true,"dependencyClosed":true,)"
        R"("onePerProduct":true,"minimal":true,"minimalityExact":true})"
        "\n");
}

TEST_CASE("identical invocations produce identical bytes") {
  CliResult first = run_cli("stitch " + demo() + " --root D:1.0");
  CliResult second = run_cli("stitch " + demo() + " --root D:1.0");
  CHECK(first.out == second.out);
  CHECK(first.out.starts_with("stitched D-1.0 (newest, strict): 5 revisions, 10 classes, 6 arcs\n"));
}

TEST_CASE("verification failures are reported and gate the exit code") {
  CliResult res = run_cli("verify " + demo() + " --root D:1.0 --members D:1.0,B:1.3");
  CHECK(res.exit_code == 0);
  CHECK(res.out ==
        "verify D-1.0: 2 members\n"
        "verification:\n"
        "  root present: yes\n"
        "  dependency closed: no (D-1.0 cannot satisfy (A =1.0 | C *))\n"
        "  one revision per product: yes\n"
        "  minimal: yes (exact)\n"
        "not a valid resolution\n");

  CliResult gated = run_cli("verify " + demo() + " --root D:1.0 --members D:1.0,B:1.3 --fail-on-findings");
  CHECK(gated.exit_code == 1);
}

TEST_CASE("impact reports spread and honors the findings gate") {
  CliResult res = run_cli("impact " + demo() + " --root D:1.0 --vuln B:1.3:f2 --format structured");
  CHECK(res.exit_code == 0);
  CHECK(res.out ==
        R"({"record":"impact","seed":"B-1.3:f2","level":"function","scope":"resolution",)"
        R"("root":"D-1.0","functions":["B-1.3:f2","C-1.4:f1"],"revisions":["B-1.3","C-1.4"],)"
        R"("products":["B","C"],"findings":true})"
        "\n");

  CliResult gated = run_cli("impact " + demo() + " --root D:1.0 --vuln B:1.3:f2 --fail-on-findings");
  CHECK(gated.exit_code == 1);

  CliResult wide = run_cli("impact " + demo() + " --vuln A:1.1:f3 --ecosystem-wide --format structured");
  CHECK(wide.exit_code == 0);
  CHECK(wide.out ==
        R"({"record":"impact","seed":"A-1.1:f3","level":"function","scope":"ecosystem",)"
        R"("functions":["A-1.1:f3","C-1.0:f2","C-1.0:y2","D-1.0:d1","D-1.0:f1"],)"
        R"("revisions":["A-1.1","C-1.0","D-1.0"],"products":["A","C","D"],"findings":true})"
        "\n");
}

TEST_CASE("centrality ranks stitched classes") {
  CliResult res = run_cli("centrality " + demo() + " --root D:1.0 --measure pagerank --top 3");
  CHECK(res.exit_code == 0);
  CHECK(res.out ==
        "pagerank (in) over stitched resolution of D-1.0: 10 nodes\n"
        "converged after 15 iterations\n"
        "  0.153277537  A-1.1:f1\n"
        "  0.135622213  A-1.1:f2\n"
        "  0.135622213  B-1.3:f2\n");
}

TEST_CASE("license checks follow the unknown policy") {
  write_file("matrix_empty.json", "{\"allowed\": []}\n");
  write_file("matrix_ignore.json", "{\"allowed\": [], \"unknownPolicy\": \"ignore\"}\n");

  CliResult flagged = run_cli("license-check " + demo() + " --root D:1.0 --matrix matrix_empty.json");
  CHECK(flagged.exit_code == 0);
  CHECK(flagged.out.starts_with("license check within resolution of D-1.0: 6 violations\n"));
  CHECK(flagged.out.find("  C-1.4:f1 (UNKNOWN) -> B-1.3:f2 (UNKNOWN)\n") != std::string::npos);

  CliResult gated =
      run_cli("license-check " + demo() + " --root D:1.0 --matrix matrix_empty.json --fail-on-findings");
  CHECK(gated.exit_code == 1);

  CliResult ignored =
      run_cli("license-check " + demo() + " --root D:1.0 --matrix matrix_ignore.json --fail-on-findings");
  CHECK(ignored.exit_code == 0);
  CHECK(ignored.out == "license check within resolution of D-1.0: no violations\n");
}

TEST_CASE("dot output renders both graph flavors") {
  CliResult resolution = run_cli("resolve " + demo() + " --root D:1.0 --dot");
  CHECK(resolution.exit_code == 0);
  CHECK(resolution.out.starts_with("digraph resolution {\n"));
  CHECK(resolution.out.find("\"D-1.0\" -> \"C-1.4\";") != std::string::npos);

  CliResult stitched = run_cli("stitch " + demo() + " --root D:1.0 --dot");
  CHECK(stitched.exit_code == 0);
  CHECK(stitched.out.starts_with("digraph stitched {\n"));
}

TEST_CASE("exit codes distinguish the failure families") {
  write_file("unsat_corpus.json",
             R"({"revisions": [{"product": "F", "version": "1.0", "depspec": )"
             R"([[{"product": "Q", "constraint": ">=1.0"}]], "callgraph": )"
             R"({"internal": [], "external": [], "arcs": []}}]})");
  CliResult unsat = run_cli("resolve --corpus unsat_corpus.json --root F:1.0");
  CHECK(unsat.exit_code == 3);
  CHECK(unsat.err == "error: no satisfiable choice for clause (Q >=1.0); required via F-1.0\n");

  CliResult dangling = run_cli("stitch " + demo() + " --root C:1.4");
  CHECK(dangling.exit_code == 5);
  CHECK(dangling.err ==
        "error: external call site 'x2' of C-1.4 binds to no function in the resolved set\n");
  CHECK(run_cli("stitch " + demo() + " --root C:1.4 --lenient").exit_code == 0);

  CliResult unknown = run_cli("resolve " + demo() + " --root Z:1.0");
  CHECK(unknown.exit_code == 4);
  CHECK(unknown.err == "error: unknown revision Z-1.0\n");

  write_file("broken_corpus.json", "not json");
  CHECK(run_cli("resolve --corpus broken_corpus.json --root D:1.0").exit_code == 4);
  CHECK(run_cli("resolve --corpus missing_corpus.json --root D:1.0").exit_code == 4);

  CHECK(run_cli("resolve --root D:1.0").exit_code == 2);
  CHECK(run_cli("resolve " + demo() + " --root D1.0").exit_code == 2);
  CHECK(run_cli("impact " + demo() + " --root D:1.0 --vuln B:1.3").exit_code == 2);
  CHECK(run_cli("impact " + demo() + " --root D:1.0 --ecosystem-wide --vuln B:1.3:f2").exit_code == 2);
  CHECK(run_cli("centrality " + demo() + " --root D:1.0 --measure fame").exit_code == 2);

  CliResult help = run_cli("--help");
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("resolve") != std::string::npos);
}

TEST_CASE("generate writes reproducible corpora") {
  CliResult first = run_cli("generate --products 3 --revisions-per-product 2 --seed 9 --output gen_a.json");
  CHECK(first.exit_code == 0);
  CHECK(first.out == "generated 6 revisions to gen_a.json\n");
  CliResult second = run_cli("generate --products 3 --revisions-per-product 2 --seed 9 --output gen_b.json");
  CHECK(second.exit_code == 0);
  CHECK(read_file("gen_a.json") == read_file("gen_b.json"));

  CliResult streamed = run_cli("generate --products 3 --revisions-per-product 2 --seed 9");
  CHECK(streamed.exit_code == 0);
  CHECK(streamed.out == read_file("gen_a.json"));

  CHECK(run_cli("generate --products 3 --external-ratio 1.5").exit_code == 2);
}
