#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "gsdmm/error.hpp"
#include "gsdmm/io.hpp"

using namespace gsdmm;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("archive round trip") {
    const auto dir = fixtures::scratch_dir("archive_roundtrip");
    const auto corpus = fixtures::make_corpus({"red red blue", "blue green", "green"}, {"x", "y", "x"});
    write_archive(dir, corpus, std::vector<std::string>{"gone"});
    CHECK(slurp(dir / "vocab.tsv") == "0\tred\t1\n1\tblue\t2\n2\tgreen\t2\n");
    CHECK(slurp(dir / "documents.tsv") == "d0\tx\t0:2 1:1\nd1\ty\t1:1 2:1\nd2\tx\t2:1\n");

    const auto back = read_archive(dir);
    CHECK(back.dropped_doc_ids == std::vector<std::string>{"gone"});
    REQUIRE(back.corpus.size() == 3);
    CHECK(back.corpus.vocab_size() == 3);
    for (std::size_t d = 0; d < 3; ++d) {
        CHECK(back.corpus[d].doc_id == corpus[d].doc_id);
        CHECK(back.corpus[d].counts == corpus[d].counts);
        CHECK(back.corpus[d].gold_label == corpus[d].gold_label);
    }
    CHECK(back.corpus.vocabulary().doc_freq(1) == 2);
}

TEST_CASE("archive without labels") {
    const auto dir = fixtures::scratch_dir("archive_nolabel");
    write_archive(dir, fixtures::make_corpus({"red", "red"}), {});
    const auto back = read_archive(dir);
    CHECK_FALSE(back.corpus[0].gold_label.has_value());
    CHECK_FALSE(back.corpus.fully_labeled());
}

TEST_CASE("damaged archives are rejected with a line number") {
    const auto dir = fixtures::scratch_dir("archive_bad");
    write_archive(dir, fixtures::make_corpus({"red", "blue"}), {});
    {
        std::ofstream out(dir / "documents.tsv");
        out << "d0\t\t0:1\nd1\t\t9:1\n";
    }
    try {
        read_archive(dir);
        FAIL("expected an error");
    } catch (const MalformedRecordError& e) {
        CHECK(e.line() == 2);
    }
    try {
        read_archive(dir / "missing");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::IoError);
    }
}

TEST_CASE("assignments csv round trip") {
    const auto corpus = fixtures::make_corpus({"red", "blue"});
    std::ostringstream out;
    write_assignments_csv(out, corpus, std::vector<ClusterId>{3, 0});
    CHECK(out.str() == "doc_id,cluster\nd0,3\nd1,0\n");
    const auto dir = fixtures::scratch_dir("assign_csv");
    {
        std::ofstream f(dir / "a.csv");
        f << out.str();
    }
    const auto rows = read_assignments_csv(dir / "a.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].first == "d0");
    CHECK(rows[0].second == 3);
    CHECK_THROWS_AS(write_assignments_csv(out, corpus, std::vector<ClusterId>{0}), Error);
}

TEST_CASE("trace and merge csv layout") {
    SweepTrace t{{1, 4, 10, 0.5, std::nullopt}};
    std::ostringstream a;
    write_trace_csv(a, t);
    CHECK(a.str() == "iteration,active_clusters,moved_docs,acc,nmi\n1,4,10,0.500000,\n");
    std::ostringstream b;
    write_merge_log_csv(b, MergeLog{{0, 2, 0.25}});
    CHECK(b.str() == "step,cluster_a,cluster_b,similarity\n1,0,2,0.250000\n");
}

TEST_CASE("eval report json") {
    EvalReport r;
    r.acc = 1.0;
    r.nmi = 0.5;
    r.k_pred = 2;
    r.k_gold = 3;
    CHECK(eval_report_json(r) == R"({"acc":1.0,"nmi":0.5,"k_pred":2,"k_gold":3})");
}
