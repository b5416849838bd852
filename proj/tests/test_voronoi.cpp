#include "gl3v/errors.hpp"
#include "gl3v/harness.hpp"
#include "gl3v/voronoi.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace gl3v;

namespace {
const CoefficientTable& sym2() {
    static const auto t = cached_table(FormKind::gl3_sym2, 1 << 22);
    return *t;
}
} // namespace

TEST_CASE("instance validation") {
    const auto& t = sym2();
    CHECK_THROWS_AS(make_instance(t, 1, 2, 4, 10.0, 0.0, Parity(0), Parity(0)).validate(), NonInvertibleError);
    CHECK_THROWS_AS(make_instance(t, 0, 1, 3, 10.0, 0.0, Parity(0), Parity(0)).validate(), DomainError);
    CHECK_THROWS_AS(make_instance(t, 1, 1, 0, 10.0, 0.0, Parity(0), Parity(0)).validate(), DomainError);
    const auto gl2 = build_table(FormKind::gl2_holomorphic, 100);
    CHECK_THROWS(make_instance(gl2, 1, 1, 3, 10.0, 0.0, Parity(0), Parity(0)).validate());
    const auto neg = make_instance(t, 1, 2, -3, 10.0, 0.0, Parity(0), Parity(0));
    CHECK(neg.a == -2);
    CHECK(neg.c == 3);
    CHECK(neg.abar() == 1);
    const auto inst = make_instance(t, 1, 2, 7, 10.0, 0.0, Parity(0), Parity(0));
    CHECK((inst.a * inst.abar()) % 7 == 1);
}

TEST_CASE("untwisted instance") {
    const auto inst = make_instance(sym2(), 1, 0, 1, 10.0, 0.0, Parity(0), Parity(0));
    const auto l = lhs_sum(inst);
    cplx direct = 0.0;
    for (std::int64_t n = 1; n <= l.n_cutoff; ++n) direct += 2.0 * sym2()(n) * inst.fam.f(n / 10.0);
    CHECK(std::abs(l.value - direct) <= 1e-10 * std::abs(direct));
    CHECK(l.tail < 1e-8 * std::abs(l.value));
    const auto r = rhs_sum(inst);
    REQUIRE(r.terms.size() == 1);
    CHECK(r.terms[0].d == 1);
    CHECK(r.terms[0].modulus == 1);
}

TEST_CASE("left side symmetries") {
    auto a = make_instance(sym2(), 1, 1, 3, 10.0, 0.0, Parity(0), Parity(0));
    auto b = make_instance(sym2(), 1, -1, 3, 10.0, 0.0, Parity(0), Parity(0));
    const auto la = lhs_sum(a), lb = lhs_sum(b);
    CHECK(std::abs(lb.value - std::conj(la.value)) <= 1e-12 * std::abs(la.value));
    auto k = a;
    k.fam.kappa = 3.0;
    CHECK(std::abs(lhs_sum(k).value - 3.0 * la.value) <= 1e-12 * std::abs(la.value));
    const auto ten = make_instance(sym2(), 1, 1, 2, 10.0, 0.0, Parity(0), Parity(0));
    const auto lt = lhs_sum(ten);
    CHECK(lt.tail < 1e-8 * std::abs(lt.value));
}

TEST_CASE("identity on two instances") {
    for (auto [a, c, T] : {std::tuple<i64, i64, double>{1, 2, 10.0}, {1, 3, 20.0}}) {
        const auto inst = make_instance(sym2(), 1, a, c, T, 0.0, Parity(0), Parity(0));
        const auto rep = identity_residual(inst);
        CHECK(rep.residual <= 1e-3);
        CHECK(rep.error_budget <= 1e-3);
        cplx total = 0.0;
        for (const auto& d : rep.divisors) total += d.partial;
        CHECK(std::abs(total - rep.rhs) <= 1e-12 * std::abs(rep.rhs));
        for (const auto& d : rep.divisors) CHECK(d.X == doctest::Approx(double(c * c * c) / (d.d * d.d * T)));

        std::ostringstream kv, csv;
        rep.write_kv(kv);
        rep.write_divisor_csv(csv);
        CHECK(kv.str().find("residual = ") != std::string::npos);
        CHECK(csv.str().rfind("# gl3v divisors v1\nd,n_cutoff,partial_re,partial_im,tail_estimate\n", 0) == 0);
    }
}

TEST_CASE("odd instance at c = 2 vanishes on both sides") {
    const auto inst = make_instance(sym2(), 1, 1, 2, 10.0, 0.0, Parity(0), Parity(1));
    const auto rep = identity_residual(inst);
    CHECK(rep.lhs == cplx(0.0));
    CHECK(rep.rhs == cplx(0.0));
    CHECK(rep.residual == 0.0);
}
