// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// fail. Criterion numbers given as arguments restrict the run.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include <gmpxx.h>

#include "bnsr.hpp"
#include "error.hpp"
#include "ore.hpp"
#include "ore_random.hpp"

using namespace novikov;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int hardware_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Check {
  bool ok = true;
  std::ostringstream why;
  void require(bool cond, const std::string &msg) {
    if (!cond && ok) {
      ok = false;
      why << msg;
    }
  }
};

int failures = 0;
int ran = 0;
std::vector<int> selected; // empty: all criteria

void report(int n, const std::string &title, const std::function<void(Check &)> &body) {
  if (!selected.empty() && std::find(selected.begin(), selected.end(), n) == selected.end())
    return;
  ++ran;
  Check c;
  const auto t0 = Clock::now();
  try {
    body(c);
  } catch (const std::exception &e) {
    c.require(false, std::string("exception: ") + e.what());
  }
  const double dt = seconds_since(t0);
  if (!c.ok)
    ++failures;
  std::printf("%s criterion %d: %s (%.1f s)%s%s\n", c.ok ? "PASS" : "FAIL", n, title.c_str(), dt,
              c.ok ? "" : ": ", c.ok ? "" : c.why.str().c_str());
  std::fflush(stdout);
}

std::string str(const Character &chi) { return chi.str(); }

// Every node without children must be a group-ring literal.
bool leaves_are_group_ring(const json &expr) {
  for (const auto &n : expr.at("nodes"))
    if (!n.contains("args") && n.at("op") != "embed")
      return false;
  return true;
}

// Independent nullity: kernel dimension of the lowest coefficient's left
// multiplication matrix, from the multiplication table directly.
Rational nullity_oracle(const TwistedPoly &p) {
  if (p.is_zero())
    return Rational(1);
  const auto &a = *p.algebra();
  const int m = a.order();
  const AlgebraElement &x = p.terms().begin()->second;
  DenseMatrix L(static_cast<std::size_t>(m), std::vector<Rational>(static_cast<std::size_t>(m)));
  for (int g = 0; g < m; ++g)
    for (int h = 0; h < m; ++h)
      L[static_cast<std::size_t>(a.mul(g, h))][static_cast<std::size_t>(h)] +=
          x.c[static_cast<std::size_t>(g)];
  return Rational(m - dense_rank(L), m);
}

} // namespace

int main(int argc, char **argv) {
  for (int i = 1; i < argc; ++i)
    selected.push_back(std::atoi(argv[i]));
  std::printf("novikov acceptance suite\n");

  report(1, "torus: all 8 characters certified at degree 2 with L <= 4, re-verified, < 60 s",
         [](Check &c) {
           const auto t0 = Clock::now();
           const auto torus = fixture("torus");
           const auto chars = default_characters(*torus.group());
           c.require(chars.size() == 8, "expected 8 characters");
           CampaignParams p;
           p.degree = 2;
           p.word_length = 4;
           p.threads = hardware_threads();
           const auto rep = run_campaign(torus, chars, p);
           c.require(rep.exit_code() == 0, "campaign exit code " + std::to_string(rep.exit_code()));
           for (const auto &o : rep.outcomes) {
             c.require(o.outcome == "certified-in-Sigma", str(o.chi) + " -> " + o.outcome);
             c.require(o.certificate && o.certificate->word_length <= 4,
                       str(o.chi) + ": no certificate with L <= 4");
             if (o.certificate)
               c.require(verify_certificate(*o.certificate, torus).accepted,
                         str(o.chi) + ": re-verification failed");
           }
           c.require(seconds_since(t0) < 60, "runtime over 60 s");
         });

  report(2, "F2: degree-1 search fails at L = 6 and witness persists to depth 6 for 4 characters",
         [](Check &c) {
           const auto f2 = fixture("f2");
           const auto rule = betti_by_euler_rule(f2.group()->spec(), f2);
           c.require(rule.betti.at(1) == Rational(1), "euler rule b1 != 1");
           for (const auto &v : std::vector<std::vector<std::int64_t>>{{1, 0}, {0, 1}, {1, 1}, {1, -1}}) {
             const Character chi(*f2.group(), v);
             SearchParams sp;
             sp.degree = 1;
             sp.word_length = 6;
             c.require(!search_contraction(f2, chi, sp).certificate, str(chi) + ": certificate found");
             WitnessParams wp;
             wp.degree = 1;
             wp.depth = 6;
             wp.word_length = 7;
             const auto w = kernel_witness(f2, chi, wp);
             c.require(w.verdict == "persistent", str(chi) + ": witness " + w.verdict);
             c.require(w.dimensions.size() == 7, str(chi) + ": witness depth");
             for (int d : w.dimensions)
               c.require(d >= 1, str(chi) + ": zero witness dimension");
           }
         });

  report(3, "F2xF2: chi = 1, b2 = 1 predicts empty Sigma^2, no degree-2 certificates, "
            "all witnesses persistent, a degree-1 certificate, < 30 min",
         [](Check &c) {
           const auto t0 = Clock::now();
           const auto g = fixture("f2xf2");
           c.require(g.euler_characteristic() == 1, "chi != 1");
           const auto rule = betti_by_euler_rule(g.group()->spec(), g);
           c.require(rule.betti.at(2) == Rational(1), "b2 != 1");
           c.require(rule.empty_sigma_degrees == std::vector<int>{2}, "no Sigma^2 prediction");
           const auto chars = default_characters(*g.group());
           CampaignParams p;
           p.degree = 2;
           p.word_length = 4;
           p.witness_depth = 6;
           p.threads = hardware_threads();
           const auto rep = run_campaign(g, chars, p);
           c.require(rep.empty_from == 2, "campaign lost the prediction");
           c.require(rep.exit_code() == 0, "campaign exit code " + std::to_string(rep.exit_code()));
           const CharacterOutcome *degree_one = nullptr;
           for (const auto &o : rep.outcomes) {
             c.require(!o.certificate, str(o.chi) + ": degree-2 certificate");
             c.require(o.outcome == "witness-persistent", str(o.chi) + " -> " + o.outcome);
             if (o.certified_through >= 1 && !degree_one)
               degree_one = &o;
           }
           c.require(degree_one != nullptr, "no character certified at degree 1");
           if (degree_one) {
             SearchParams sp;
             sp.degree = 1;
             sp.word_length = p.word_length;
             const auto s = search_contraction(g, degree_one->chi, sp);
             c.require(s.certificate && verify_certificate(*s.certificate, g).accepted,
                       str(degree_one->chi) + ": degree-1 certificate does not re-verify");
           }
           c.require(seconds_since(t0) < 1800, "runtime over 30 min");
         });

  report(4, "mapping torus: fibration character has a degree-1 certificate with L <= 6",
         [](Check &c) {
           const auto mt = fixture("mapping-torus");
           const Character chi(*mt.group(), std::vector<std::int64_t>{0, 0, 1});
           bool found = false;
           for (int L = 1; L <= 6 && !found; ++L) {
             SearchParams sp;
             sp.degree = 1;
             sp.word_length = L;
             const auto s = search_contraction(mt, chi, sp);
             if (s.certificate) {
               found = true;
               c.require(verify_certificate(*s.certificate, mt).accepted, "re-verification failed");
             }
           }
           c.require(found, "no certificate up to L = 6");
         });

  report(5, "F2 regular quotients of order 2, 3, 4, 6: b1/m = 1 + 1/m and alternating sum -1",
         [](Check &c) {
           const auto f2 = fixture("f2");
           auto perm = [](std::vector<int> p) { return Permutation(std::move(p)); };
           const std::vector<FiniteQuotient> qs{
               FiniteQuotient(f2.group(), {perm({1, 0}), perm({0, 1})}),
               FiniteQuotient(f2.group(), {perm({1, 2, 0}), perm({2, 0, 1})}),
               FiniteQuotient(f2.group(), {perm({1, 0, 2, 3}), perm({0, 1, 3, 2})}),
               FiniteQuotient(f2.group(), {perm({1, 0, 2}), perm({1, 2, 0})})};
           const auto rep = betti_by_quotients(f2, qs);
           const std::vector<int> orders{2, 3, 4, 6};
           for (std::size_t i = 0; i < orders.size(); ++i) {
             const auto &q = rep.quotients.at(i);
             const int m = orders[i];
             c.require(q.order == m, "order " + std::to_string(q.order) + " != " + std::to_string(m));
             c.require(q.normalized.at(1) == Rational(1) + Rational(1, m),
                       "b1/m = " + q.normalized.at(1).str() + " at m = " + std::to_string(m));
             c.require(q.alternating_sum == Rational(-1), "alternating sum at m = " + std::to_string(m));
           }
         });

  report(6, "approximate Ore: 100 instances per algebra, degree <= 3, eps 1/2 and 1/4, < 5 min",
         [](Check &c) {
           const auto t0 = Clock::now();
           std::mt19937_64 rng(20240607);
           int runs = 0;
           for (const auto &a : testing::ore_algebras())
             for (int it = 0; it < 100; ++it) {
               const auto q = testing::random_poly(a, rng, 3);
               const auto qp = testing::random_poly(a, rng, 3);
               const std::int64_t N = std::max(q.degree() - q.init_power(), qp.degree() - qp.init_power());
               for (const Rational &eps : {Rational(1, 2), Rational(1, 4)}) {
                 const auto res = approx_ore(q, qp, eps, static_cast<std::uint64_t>(it));
                 ++runs;
                 const std::string tag = a->name() + " #" + std::to_string(it) + " eps " + eps.str();
                 c.require(q * res.r == qp * res.rp, tag + ": q r != q' r'");
                 const Rational nr = nullity_oracle(res.r), nrp = nullity_oracle(res.rp);
                 const Rational nq = nullity_oracle(q), nqp = nullity_oracle(qp);
                 c.require(nr < nqp + eps, tag + ": nul r bound");
                 c.require(nrp < nq + nqp + eps, tag + ": nul r' bound");
                 mpz_class ceil_b;
                 const mpq_class b = mpq_class(N + 1) / eps.to_mpq();
                 mpz_cdiv_q(ceil_b.get_mpz_t(), b.get_num_mpz_t(), b.get_den_mpz_t());
                 const std::int64_t bound = ceil_b.get_si() + N + 1;
                 c.require(res.k >= 1 && res.k <= bound, tag + ": k over the bound");
                 c.require(static_cast<int>(res.d.size()) == res.k, tag + ": d_k ledger length");
                 for (std::size_t k = 1; k <= res.d.size(); ++k)
                   c.require(res.d[k - 1] >= Rational(static_cast<std::int64_t>(k) - N),
                             tag + ": d_k < k - N");
               }
             }
           c.require(runs == 800, "run count");
           c.require(seconds_since(t0) < 300, "runtime over 5 min");
         });

  report(7, "rebuild on torus and circle: identities hold at radius 2r, leaves in QG",
         [](Check &c) {
           for (const std::string name : {"torus", "circle"}) {
             const auto cx = fixture(name);
             for (const auto &chi : default_characters(*cx.group())) {
               SearchParams sp;
               sp.degree = cx.top();
               sp.word_length = 4;
               const auto s = search_contraction(cx, chi, sp);
               c.require(s.certificate.has_value(), name + " " + str(chi) + ": no certificate");
               if (!s.certificate)
                 continue;
               const auto ctx = make_context(cx.group(), chi);
               const auto out = rebuild_all(cx, novikov_homotopy(cx, *s.certificate, ctx),
                                            s.certificate->positivity_radius);
               for (int i = 0; i <= cx.top(); ++i) {
                 const auto &res = out.at(static_cast<std::size_t>(i));
                 const std::string tag = name + " " + str(chi) + " H_" + std::to_string(i);
                 c.require(res.H.in_division_closure(), tag + ": outside the division closure");
                 for (int r = 0; r < res.H.rows(); ++r)
                   for (int k = 0; k < res.H.cols(); ++k)
                     c.require(leaves_are_group_ring(res.H.at(r, k).to_json()),
                               tag + ": leaf outside QG");
                 const auto Di = NovikovMatrix::from_group_ring(ctx, cx.boundary(i));
                 const auto Dn = NovikovMatrix::from_group_ring(ctx, cx.boundary(i + 1));
                 NovikovMatrix lhs = Dn * res.H;
                 if (i > 0)
                   lhs = lhs + out.at(static_cast<std::size_t>(i) - 1).H * Di;
                 const GRMatrix id = GRMatrix::identity(cx.group(), cx.rank(i));
                 c.require(lhs.truncate(2 * res.radius) == id, tag + ": identity fails at 2r");
                 c.require(lhs.truncate(res.verify_radius) == id, tag + ": identity fails at verify radius");
               }
             }
           }
         });

  report(8, "200 random single-coefficient corruptions are rejected with a location",
         [](Check &c) {
           std::vector<std::pair<ChainComplex, ContractionCertificate>> pool;
           for (const std::string name : {"torus", "circle", "mapping-torus"}) {
             const auto cx = fixture(name);
             for (const auto &chi : default_characters(*cx.group())) {
               SearchParams sp;
               sp.degree = name == "mapping-torus" ? 1 : cx.top();
               sp.word_length = 4;
               if (auto s = search_contraction(cx, chi, sp); s.certificate)
                 pool.emplace_back(cx, *s.certificate);
             }
           }
           c.require(pool.size() >= 10, "too few certificates to corrupt");
           std::mt19937_64 rng(8);
           const std::vector<Rational> deltas{Rational(1), Rational(-1), Rational(1, 2),
                                              Rational(-3), Rational(5, 7)};
           int rejected = 0;
           for (int it = 0; it < 200; ++it) {
             const auto &[cx, cert] = pool[rng() % pool.size()];
             ContractionCertificate bad = cert;
             // Pick a stored coefficient uniformly and perturb it.
             std::vector<std::tuple<std::size_t, int, int, std::size_t>> slots;
             for (std::size_t m = 0; m < bad.maps.size(); ++m)
               for (int i = 0; i < bad.maps[m].rows(); ++i)
                 for (int j = 0; j < bad.maps[m].cols(); ++j)
                   for (std::size_t t = 0; t < bad.maps[m].at(i, j).terms().size(); ++t)
                     slots.emplace_back(m, i, j, t);
             const auto [m, i, j, t] = slots[rng() % slots.size()];
             auto terms = bad.maps[m].at(i, j).terms();
             terms[t].second += deltas[rng() % deltas.size()];
             bad.maps[m].at(i, j) = GroupRingElement::from_terms(cx.group(), std::move(terms));
             const auto v = verify_certificate(bad, cx);
             const bool located = !v.accepted && v.degree >= 0 && v.row >= 0 && v.col >= 0 &&
                                  !(v.expected == v.found);
             c.require(located, "corruption " + std::to_string(it) + " of " + cx.name() + " " +
                                    str(cert.chi) + " not rejected with a location");
             rejected += located;
           }
           c.require(rejected == 200, std::to_string(rejected) + "/200 rejected");
         });

  std::printf("%s: %d of %d criteria failed\n", failures ? "FAIL" : "PASS", failures, ran);
  return failures ? 1 : 0;
}
