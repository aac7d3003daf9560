#include "group.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "error.hpp"

namespace novikov {

namespace {

constexpr int kMaxNesting = 4;

int nesting_depth(const GroupSpec &spec) {
  if (spec.kind != GroupSpec::Kind::DirectProduct)
    return 0;
  int d = 0;
  for (const auto &f : spec.factors)
    d = std::max(d, nesting_depth(f));
  return d + 1;
}

std::string kind_name(GroupSpec::Kind k) {
  switch (k) {
  case GroupSpec::Kind::FreeGroup:
    return "FreeGroup";
  case GroupSpec::Kind::FreeAbelian:
    return "FreeAbelian";
  case GroupSpec::Kind::DirectProduct:
    return "DirectProduct";
  case GroupSpec::Kind::FreeByZ:
    return "FreeByZ";
  }
  return "?";
}

// Exact determinant of a small integer matrix.
Rational determinant(std::vector<std::vector<Rational>> m) {
  const std::size_t n = m.size();
  Rational det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c].is_zero())
      ++p;
    if (p == n)
      return Rational(0);
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m[r][c].is_zero())
        continue;
      Rational f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k)
        m[r][k].sub_mul(f, m[c][k]);
    }
  }
  return det;
}

Word concat(const Word &a, const Word &b) {
  Word w(a);
  w.insert(w.end(), b.begin(), b.end());
  free_reduce(w);
  return w;
}

// Nielsen reduction of the image tuple. Returns the inverse images, or
// nothing if the greedy length reduction stalls before reaching a
// permutation of the generators.
std::optional<std::vector<Word>> nielsen_inverse(const std::vector<Word> &images) {
  const std::size_t r = images.size();
  std::vector<Word> u = images;
  std::vector<Word> track(r);
  for (std::size_t i = 0; i < r; ++i)
    track[i] = Word{static_cast<int>(i + 1)};

  auto total = [&] {
    std::size_t s = 0;
    for (const auto &w : u)
      s += w.size();
    return s;
  };

  for (int guard = 0; guard < 100000; ++guard) {
    if (total() == r) {
      bool ok = std::all_of(u.begin(), u.end(),
                            [](const Word &w) { return w.size() == 1; });
      if (ok)
        break;
    }
    bool improved = false;
    for (std::size_t i = 0; i < r && !improved; ++i) {
      for (std::size_t j = 0; j < r && !improved; ++j) {
        if (i == j)
          continue;
        for (int e : {1, -1}) {
          Word uj = e > 0 ? u[j] : invert_word(u[j]);
          Word tj = e > 0 ? track[j] : invert_word(track[j]);
          Word right = concat(u[i], uj);
          if (right.size() < u[i].size()) {
            u[i] = right;
            track[i] = concat(track[i], tj);
            improved = true;
            break;
          }
          Word left = concat(uj, u[i]);
          if (left.size() < u[i].size()) {
            u[i] = left;
            track[i] = concat(tj, track[i]);
            improved = true;
            break;
          }
        }
      }
    }
    if (!improved)
      break;
  }

  std::vector<Word> inverse(r);
  std::vector<bool> seen(r, false);
  for (std::size_t i = 0; i < r; ++i) {
    if (u[i].size() != 1)
      return std::nullopt;
    int letter = u[i][0];
    std::size_t g = static_cast<std::size_t>(std::abs(letter) - 1);
    if (seen[g])
      return std::nullopt;
    seen[g] = true;
    // alpha(track_i) = a_g^{sign}  =>  alpha^{-1}(a_g) = track_i^{sign}
    inverse[g] = letter > 0 ? track[i] : invert_word(track[i]);
  }
  return inverse;
}

int letter_key(int l) { return (std::abs(l) - 1) * 2 + (l < 0 ? 1 : 0); }

} // namespace

void free_reduce(Word &w) {
  std::size_t out = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (out > 0 && w[out - 1] == -w[i])
      --out;
    else
      w[out++] = w[i];
  }
  w.resize(out);
}

Word invert_word(const Word &w) {
  Word r(w.rbegin(), w.rend());
  for (int &l : r)
    l = -l;
  return r;
}

std::string word_to_string(const Word &w, int offset) {
  std::string s;
  for (int l : w) {
    char c = static_cast<char>('a' + (std::abs(l) - 1 - offset));
    s.push_back(l > 0 ? c : static_cast<char>(c - 'a' + 'A'));
  }
  return s;
}

Word word_from_string(const std::string &s) {
  Word w;
  for (char c : s) {
    if (c >= 'a' && c <= 'z')
      w.push_back(c - 'a' + 1);
    else if (c >= 'A' && c <= 'Z')
      w.push_back(-(c - 'A' + 1));
    else if (c == '1' && s.size() == 1)
      continue;
    else
      throw Error(ErrorKind::InvalidInput,
                  "bad letter '" + std::string(1, c) + "' in word '" + s + "'");
  }
  free_reduce(w);
  return w;
}

bool shortlex_less(const Word &a, const Word &b) {
  if (a.size() != b.size())
    return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    int ka = letter_key(a[i]), kb = letter_key(b[i]);
    if (ka != kb)
      return ka < kb;
  }
  return false;
}

GroupSpec GroupSpec::free_group(int rank) {
  GroupSpec s;
  s.kind = Kind::FreeGroup;
  s.rank = rank;
  return s;
}

GroupSpec GroupSpec::free_abelian(int rank) {
  GroupSpec s;
  s.kind = Kind::FreeAbelian;
  s.rank = rank;
  return s;
}

GroupSpec GroupSpec::direct_product(std::vector<GroupSpec> factors) {
  GroupSpec s;
  s.kind = Kind::DirectProduct;
  s.rank = 0;
  s.factors = std::move(factors);
  return s;
}

GroupSpec GroupSpec::free_by_z(int fiber_rank, std::vector<Word> images) {
  GroupSpec s;
  s.kind = Kind::FreeByZ;
  s.rank = fiber_rank;
  s.automorphism = std::move(images);
  return s;
}

json spec_to_json(const GroupSpec &spec) {
  json j;
  j["kind"] = kind_name(spec.kind);
  switch (spec.kind) {
  case GroupSpec::Kind::FreeGroup:
  case GroupSpec::Kind::FreeAbelian:
    j["rank"] = spec.rank;
    break;
  case GroupSpec::Kind::DirectProduct: {
    json fs = json::array();
    for (const auto &f : spec.factors)
      fs.push_back(spec_to_json(f));
    j["factors"] = fs;
    break;
  }
  case GroupSpec::Kind::FreeByZ: {
    j["fiberRank"] = spec.rank;
    json imgs = json::array();
    for (const auto &w : spec.automorphism)
      imgs.push_back(word_to_string(w));
    j["automorphism"] = imgs;
    break;
  }
  }
  return j;
}

GroupSpec spec_from_json(const json &j) {
  if (!j.is_object() || !j.contains("kind"))
    throw Error(ErrorKind::InvalidInput, "group spec must be an object with 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  auto rank_of = [&](const char *key) {
    if (!j.contains(key) || !j.at(key).is_number_integer())
      throw Error(ErrorKind::InvalidInput,
                  std::string("group spec needs integer '") + key + "'");
    return j.at(key).get<int>();
  };
  if (kind == "FreeGroup")
    return GroupSpec::free_group(rank_of("rank"));
  if (kind == "FreeAbelian")
    return GroupSpec::free_abelian(rank_of("rank"));
  if (kind == "DirectProduct") {
    std::vector<GroupSpec> fs;
    for (const auto &f : j.at("factors"))
      fs.push_back(spec_from_json(f));
    return GroupSpec::direct_product(std::move(fs));
  }
  if (kind == "FreeByZ") {
    std::vector<Word> imgs;
    for (const auto &w : j.at("automorphism"))
      imgs.push_back(word_from_string(w.get<std::string>()));
    return GroupSpec::free_by_z(rank_of("fiberRank"), std::move(imgs));
  }
  throw Error(ErrorKind::InvalidInput, "unknown group kind '" + kind + "'");
}

Group::Group(GroupSpec spec) : spec_(std::move(spec)) {
  switch (spec_.kind) {
  case GroupSpec::Kind::FreeGroup:
  case GroupSpec::Kind::FreeAbelian:
    if (spec_.rank < 1 || spec_.rank > 26)
      throw Error(ErrorKind::InvalidInput, "rank must be in 1..26");
    generator_count_ = spec_.rank;
    break;
  case GroupSpec::Kind::DirectProduct: {
    if (spec_.factors.size() < 2)
      throw Error(ErrorKind::InvalidInput,
                  "DirectProduct needs at least two factors");
    if (nesting_depth(spec_) > kMaxNesting)
      throw Error(ErrorKind::InvalidInput, "DirectProduct nested too deeply");
    for (const auto &f : spec_.factors) {
      factor_offsets_.push_back(generator_count_);
      factors_.push_back(Group::make(f));
      generator_count_ += factors_.back()->generator_count();
    }
    break;
  }
  case GroupSpec::Kind::FreeByZ: {
    const int r = spec_.rank;
    if (r < 1 || r > 19)
      throw Error(ErrorKind::InvalidInput, "fiber rank must be in 1..19");
    if (static_cast<int>(spec_.automorphism.size()) != r)
      throw Error(ErrorKind::InvalidInput,
                  "automorphism needs one image per fiber generator");
    std::vector<std::vector<Rational>> ab(r, std::vector<Rational>(r));
    for (int i = 0; i < r; ++i) {
      Word w = spec_.automorphism[i];
      free_reduce(w);
      if (w.empty())
        throw Error(ErrorKind::InvalidInput, "automorphism image is trivial");
      for (int l : w) {
        if (std::abs(l) > r)
          throw Error(ErrorKind::InvalidInput,
                      "automorphism image uses a letter outside the fiber");
        ab[std::abs(l) - 1][i] += Rational(l > 0 ? 1 : -1);
      }
      spec_.automorphism[i] = w;
    }
    Rational det = determinant(ab);
    if (!(det == Rational(1) || det == Rational(-1)))
      throw Error(ErrorKind::InvalidInput,
                  "automorphism is not invertible on the abelianization (det " +
                      det.str() + ")");
    auto inv = nielsen_inverse(spec_.automorphism);
    if (!inv)
      throw Error(ErrorKind::InvalidInput,
                  "automorphism images do not form a free basis (Nielsen "
                  "reduction stalled)");
    alpha_ = spec_.automorphism;
    alpha_inv_ = *inv;
    generator_count_ = r + 1;
    break;
  }
  }
}

std::shared_ptr<const Group> Group::make(const GroupSpec &spec) {
  return std::shared_ptr<const Group>(new Group(spec));
}

std::string Group::generator_name(int index) const {
  switch (spec_.kind) {
  case GroupSpec::Kind::FreeGroup:
  case GroupSpec::Kind::FreeAbelian:
    return std::string(1, static_cast<char>('a' + index));
  case GroupSpec::Kind::FreeByZ:
    return index == spec_.rank ? "t"
                               : std::string(1, static_cast<char>('a' + index));
  case GroupSpec::Kind::DirectProduct:
    for (std::size_t f = factors_.size(); f-- > 0;) {
      if (index >= factor_offsets_[f])
        return factors_[f]->generator_name(index - factor_offsets_[f]) + "_" +
               std::to_string(f + 1);
    }
  }
  return "?";
}

Element Group::identity() const {
  Element e;
  switch (spec_.kind) {
  case GroupSpec::Kind::FreeGroup:
    break;
  case GroupSpec::Kind::FreeAbelian:
    e.code.assign(static_cast<std::size_t>(spec_.rank), 0);
    break;
  case GroupSpec::Kind::DirectProduct:
    for (const auto &f : factors_) {
      Element fe = f->identity();
      e.code.push_back(static_cast<std::int32_t>(fe.code.size()));
      e.code.insert(e.code.end(), fe.code.begin(), fe.code.end());
    }
    break;
  case GroupSpec::Kind::FreeByZ:
    e.code.push_back(0);
    break;
  }
  return e;
}

bool Group::is_identity(const Element &x) const { return x == identity(); }

Element Group::generator(int index, bool inverse) const {
  if (index < 0 || index >= generator_count_)
    throw Error(ErrorKind::InvalidInput, "generator index out of range");
  const int s = inverse ? -1 : 1;
  Element e;
  switch (spec_.kind) {
  case GroupSpec::Kind::FreeGroup:
    e.code.push_back(s * (index + 1));
    break;
  case GroupSpec::Kind::FreeAbelian:
    e.code.assign(static_cast<std::size_t>(spec_.rank), 0);
    e.code[static_cast<std::size_t>(index)] = s;
    break;
  case GroupSpec::Kind::DirectProduct:
    for (std::size_t f = 0; f < factors_.size(); ++f) {
      const int lo = factor_offsets_[f];
      const int hi = lo + factors_[f]->generator_count();
      Element fe = (index >= lo && index < hi)
                       ? factors_[f]->generator(index - lo, inverse)
                       : factors_[f]->identity();
      e.code.push_back(static_cast<std::int32_t>(fe.code.size()));
      e.code.insert(e.code.end(), fe.code.begin(), fe.code.end());
    }
    break;
  case GroupSpec::Kind::FreeByZ:
    if (index == spec_.rank) {
      e.code.push_back(s);
    } else {
      e.code.push_back(s * (index + 1));
      e.code.push_back(0);
    }
    break;
  }
  return e;
}

Word Group::apply_automorphism(const Word &w, std::int64_t power) const {
  Word cur = w;
  const auto &table = power > 0 ? alpha_ : alpha_inv_;
  for (std::int64_t p = 0; p < (power > 0 ? power : -power); ++p) {
    Word next;
    for (int l : cur) {
      const Word &img = table[static_cast<std::size_t>(std::abs(l) - 1)];
      if (l > 0) {
        next.insert(next.end(), img.begin(), img.end());
      } else {
        for (auto it = img.rbegin(); it != img.rend(); ++it)
          next.push_back(-*it);
      }
    }
    free_reduce(next);
    cur = std::move(next);
  }
  return cur;
}

void Group::mul_into(std::span<const std::int32_t> a,
                     std::span<const std::int32_t> b, Element &out) const {
  switch (spec_.kind) {
  case GroupSpec::Kind::FreeGroup: {
    out.code.assign(a.begin(), a.end());
    for (std::int32_t l : b) {
      if (!out.code.empty() && out.code.back() == -l)
        out.code.pop_back();
      else
        out.code.push_back(l);
    }
    return;
  }
  case GroupSpec::Kind::FreeAbelian:
    out.code.assign(a.begin(), a.end());
    for (std::size_t i = 0; i < b.size(); ++i)
      out.code[i] += b[i];
    return;
  case GroupSpec::Kind::DirectProduct: {
    out.code.clear();
    std::size_t pa = 0, pb = 0;
    Element tmp;
    for (const auto &f : factors_) {
      auto la = static_cast<std::size_t>(a[pa]);
      auto lb = static_cast<std::size_t>(b[pb]);
      f->mul_into(a.subspan(pa + 1, la), b.subspan(pb + 1, lb), tmp);
      out.code.push_back(static_cast<std::int32_t>(tmp.code.size()));
      out.code.insert(out.code.end(), tmp.code.begin(), tmp.code.end());
      pa += la + 1;
      pb += lb + 1;
    }
    return;
  }
  case GroupSpec::Kind::FreeByZ: {
    const std::int32_t na = a.back();
    const std::int32_t nb = b.back();
    Word wb(b.begin(), b.end() - 1);
    if (na != 0)
      wb = apply_automorphism(wb, na);
    out.code.assign(a.begin(), a.end() - 1);
    for (int l : wb) {
      if (!out.code.empty() && out.code.back() == -l)
        out.code.pop_back();
      else
        out.code.push_back(l);
    }
    out.code.push_back(na + nb);
    return;
  }
  }
}

void Group::inv_into(std::span<const std::int32_t> a, Element &out) const {
  switch (spec_.kind) {
  case GroupSpec::Kind::FreeGroup:
    out.code.assign(a.rbegin(), a.rend());
    for (auto &l : out.code)
      l = -l;
    return;
  case GroupSpec::Kind::FreeAbelian:
    out.code.assign(a.begin(), a.end());
    for (auto &e : out.code)
      e = -e;
    return;
  case GroupSpec::Kind::DirectProduct: {
    out.code.clear();
    std::size_t pa = 0;
    Element tmp;
    for (const auto &f : factors_) {
      auto la = static_cast<std::size_t>(a[pa]);
      f->inv_into(a.subspan(pa + 1, la), tmp);
      out.code.push_back(static_cast<std::int32_t>(tmp.code.size()));
      out.code.insert(out.code.end(), tmp.code.begin(), tmp.code.end());
      pa += la + 1;
    }
    return;
  }
  case GroupSpec::Kind::FreeByZ: {
    const std::int32_t n = a.back();
    Word w = invert_word(Word(a.begin(), a.end() - 1));
    if (n != 0)
      w = apply_automorphism(w, -n);
    out.code.assign(w.begin(), w.end());
    out.code.push_back(-n);
    return;
  }
  }
}

Element Group::multiply(const Element &x, const Element &y) const {
  Element out;
  mul_into(x.view(), y.view(), out);
  return out;
}

Element Group::invert(const Element &x) const {
  Element out;
  inv_into(x.view(), out);
  return out;
}

Element Group::from_word(std::span<const int> letters) const {
  Element e = identity();
  for (int l : letters) {
    if (l == 0 || std::abs(l) > generator_count_)
      throw Error(ErrorKind::InvalidInput, "letter out of range");
    e = multiply(e, generator(std::abs(l) - 1, l < 0));
  }
  return e;
}

Element Group::normalize(const Element &x) const {
  // Multiplying by the identity re-reduces every layout.
  Element out;
  Element id = identity();
  mul_into(id.view(), x.view(), out);
  if (spec_.kind == GroupSpec::Kind::FreeGroup) {
    Word w(out.code.begin(), out.code.end());
    free_reduce(w);
    out.code.assign(w.begin(), w.end());
  } else if (spec_.kind == GroupSpec::Kind::FreeByZ) {
    Word w(out.code.begin(), out.code.end() - 1);
    free_reduce(w);
    std::int32_t n = out.code.back();
    out.code.assign(w.begin(), w.end());
    out.code.push_back(n);
  } else if (spec_.kind == GroupSpec::Kind::DirectProduct) {
    auto parts = split(out);
    out.code.clear();
    for (std::size_t f = 0; f < parts.size(); ++f) {
      Element p = factors_[f]->normalize(parts[f]);
      out.code.push_back(static_cast<std::int32_t>(p.code.size()));
      out.code.insert(out.code.end(), p.code.begin(), p.code.end());
    }
  }
  return out;
}

void Group::word_into(std::span<const std::int32_t> code, int offset,
                      Word &out) const {
  switch (spec_.kind) {
  case GroupSpec::Kind::FreeGroup:
    for (std::int32_t l : code)
      out.push_back(l > 0 ? l + offset : l - offset);
    return;
  case GroupSpec::Kind::FreeAbelian:
    for (std::size_t i = 0; i < code.size(); ++i) {
      const int g = static_cast<int>(i) + 1 + offset;
      for (std::int32_t k = 0; k < std::abs(code[i]); ++k)
        out.push_back(code[i] > 0 ? g : -g);
    }
    return;
  case GroupSpec::Kind::DirectProduct: {
    std::size_t p = 0;
    for (std::size_t f = 0; f < factors_.size(); ++f) {
      auto len = static_cast<std::size_t>(code[p]);
      factors_[f]->word_into(code.subspan(p + 1, len),
                             offset + factor_offsets_[f], out);
      p += len + 1;
    }
    return;
  }
  case GroupSpec::Kind::FreeByZ: {
    for (std::size_t i = 0; i + 1 < code.size(); ++i)
      out.push_back(code[i] > 0 ? code[i] + offset : code[i] - offset);
    const int t = spec_.rank + 1 + offset;
    for (std::int32_t k = 0; k < std::abs(code.back()); ++k)
      out.push_back(code.back() > 0 ? t : -t);
    return;
  }
  }
}

Word Group::canonical_word(const Element &x) const {
  Word w;
  word_into(x.view(), 0, w);
  return w;
}

std::int64_t Group::phi_span(std::span<const std::int64_t> v,
                             std::span<const std::int32_t> code) const {
  std::int64_t s = 0;
  switch (spec_.kind) {
  case GroupSpec::Kind::FreeGroup:
    for (std::int32_t l : code)
      s += l > 0 ? v[static_cast<std::size_t>(l - 1)]
                 : -v[static_cast<std::size_t>(-l - 1)];
    return s;
  case GroupSpec::Kind::FreeAbelian:
    for (std::size_t i = 0; i < code.size(); ++i)
      s += code[i] * v[i];
    return s;
  case GroupSpec::Kind::DirectProduct: {
    std::size_t p = 0;
    for (std::size_t f = 0; f < factors_.size(); ++f) {
      auto len = static_cast<std::size_t>(code[p]);
      s += factors_[f]->phi_span(
          v.subspan(static_cast<std::size_t>(factor_offsets_[f]),
                    static_cast<std::size_t>(factors_[f]->generator_count())),
          code.subspan(p + 1, len));
      p += len + 1;
    }
    return s;
  }
  case GroupSpec::Kind::FreeByZ:
    for (std::size_t i = 0; i + 1 < code.size(); ++i) {
      std::int32_t l = code[i];
      s += l > 0 ? v[static_cast<std::size_t>(l - 1)]
                 : -v[static_cast<std::size_t>(-l - 1)];
    }
    s += code.back() * v[static_cast<std::size_t>(spec_.rank)];
    return s;
  }
  return s;
}

std::int64_t Group::phi(std::span<const std::int64_t> values,
                        const Element &x) const {
  return phi_span(values, x.view());
}

std::int64_t Group::phi(const Character &chi, const Element &x) const {
  return phi_span(chi.values(), x.view());
}

std::vector<Element> Group::split(const Element &x) const {
  std::vector<Element> parts;
  std::size_t p = 0;
  for (std::size_t f = 0; f < factors_.size(); ++f) {
    auto len = static_cast<std::size_t>(x.code[p]);
    Element e;
    e.code.assign(x.code.begin() + static_cast<std::ptrdiff_t>(p + 1),
                  x.code.begin() + static_cast<std::ptrdiff_t>(p + 1 + len));
    parts.push_back(std::move(e));
    p += len + 1;
  }
  return parts;
}

Element Group::embed_factor(std::size_t factor, const Element &x) const {
  Element e;
  for (std::size_t f = 0; f < factors_.size(); ++f) {
    Element fe = f == factor ? x : factors_[f]->identity();
    e.code.push_back(static_cast<std::int32_t>(fe.code.size()));
    e.code.insert(e.code.end(), fe.code.begin(), fe.code.end());
  }
  return e;
}

json Group::element_to_json(const Element &x) const {
  switch (spec_.kind) {
  case GroupSpec::Kind::FreeGroup:
    return word_to_string(Word(x.code.begin(), x.code.end()));
  case GroupSpec::Kind::FreeAbelian: {
    json a = json::array();
    for (std::int32_t e : x.code)
      a.push_back(e);
    return a;
  }
  case GroupSpec::Kind::DirectProduct: {
    json a = json::array();
    auto parts = split(x);
    for (std::size_t f = 0; f < parts.size(); ++f)
      a.push_back(factors_[f]->element_to_json(parts[f]));
    return a;
  }
  case GroupSpec::Kind::FreeByZ: {
    json o;
    o["fiber"] = word_to_string(Word(x.code.begin(), x.code.end() - 1));
    o["t"] = x.code.back();
    return o;
  }
  }
  return nullptr;
}

Element Group::element_from_json(const json &j) const {
  Element e;
  switch (spec_.kind) {
  case GroupSpec::Kind::FreeGroup: {
    Word w = word_from_string(j.get<std::string>());
    for (int l : w)
      if (std::abs(l) > spec_.rank)
        throw Error(ErrorKind::InvalidInput, "letter outside free group rank");
    e.code.assign(w.begin(), w.end());
    return e;
  }
  case GroupSpec::Kind::FreeAbelian: {
    if (!j.is_array() || static_cast<int>(j.size()) != spec_.rank)
      throw Error(ErrorKind::InvalidInput, "abelian element needs rank entries");
    for (const auto &v : j)
      e.code.push_back(v.get<std::int32_t>());
    return e;
  }
  case GroupSpec::Kind::DirectProduct: {
    if (!j.is_array() || j.size() != factors_.size())
      throw Error(ErrorKind::InvalidInput,
                  "product element needs one entry per factor");
    for (std::size_t f = 0; f < factors_.size(); ++f) {
      Element fe = factors_[f]->element_from_json(j[f]);
      e.code.push_back(static_cast<std::int32_t>(fe.code.size()));
      e.code.insert(e.code.end(), fe.code.begin(), fe.code.end());
    }
    return e;
  }
  case GroupSpec::Kind::FreeByZ: {
    Word w = word_from_string(j.at("fiber").get<std::string>());
    for (int l : w)
      if (std::abs(l) > spec_.rank)
        throw Error(ErrorKind::InvalidInput, "letter outside fiber rank");
    e.code.assign(w.begin(), w.end());
    e.code.push_back(j.at("t").get<std::int32_t>());
    return e;
  }
  }
  return e;
}

std::string Group::element_to_string(const Element &x) const {
  Word w = canonical_word(x);
  if (w.empty())
    return "1";
  std::string s;
  for (int l : w) {
    std::string name = generator_name(std::abs(l) - 1);
    s += l > 0 ? name : name + "^-1";
    s += "*";
  }
  s.pop_back();
  return s;
}

GroupElement multiply(const GroupElement &x, const GroupElement &y) {
  if (!x.group || !y.group || !(x.group->spec() == y.group->spec()))
    throw Error(ErrorKind::SpecMismatch, "elements from different groups");
  return {x.group, x.group->multiply(x.value, y.value)};
}

GroupElement invert(const GroupElement &x) {
  return {x.group, x.group->invert(x.value)};
}

// ---------------------------------------------------------------- Character

namespace {

std::vector<std::int64_t> integralize(const std::vector<Rational> &in) {
  mpz_class lcm = 1;
  for (const auto &q : in)
    mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), q.denominator().get_mpz_t());
  std::vector<mpz_class> ints;
  mpz_class g = 0;
  for (const auto &q : in) {
    mpz_class v = q.numerator() * (lcm / q.denominator());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    ints.push_back(v);
  }
  std::vector<std::int64_t> out;
  for (auto &v : ints) {
    if (g != 0)
      v /= g;
    if (!v.fits_slong_p())
      throw Error(ErrorKind::InvalidInput, "character value too large");
    out.push_back(v.get_si());
  }
  return out;
}

void validate_on(const Group &group, std::span<const std::int64_t> v) {
  switch (group.kind()) {
  case GroupSpec::Kind::FreeGroup:
  case GroupSpec::Kind::FreeAbelian:
    return;
  case GroupSpec::Kind::DirectProduct: {
    std::size_t off = 0;
    for (const auto &f : group.factors()) {
      auto n = static_cast<std::size_t>(f->generator_count());
      validate_on(*f, v.subspan(off, n));
      off += n;
    }
    return;
  }
  case GroupSpec::Kind::FreeByZ: {
    const int r = group.spec().rank;
    for (int i = 0; i < r; ++i) {
      std::int64_t img = 0;
      for (int l : group.spec().automorphism[static_cast<std::size_t>(i)])
        img += l > 0 ? v[static_cast<std::size_t>(l - 1)]
                     : -v[static_cast<std::size_t>(-l - 1)];
      if (img != v[static_cast<std::size_t>(i)])
        throw Error(ErrorKind::InvalidInput,
                    "character is not invariant under the fiber automorphism");
    }
    return;
  }
  }
}

} // namespace

Character::Character(const Group &group, std::vector<Rational> values)
    : input_(std::move(values)) {
  values_ = integralize(input_);
  validate(group);
}

Character::Character(const Group &group, std::vector<std::int64_t> values) {
  for (auto v : values)
    input_.emplace_back(v);
  values_ = integralize(input_);
  validate(group);
}

void Character::validate(const Group &group) const {
  if (static_cast<int>(values_.size()) != group.generator_count())
    throw Error(ErrorKind::SpecMismatch,
                "character needs one value per generator (" +
                    std::to_string(group.generator_count()) + ")");
  if (std::all_of(values_.begin(), values_.end(),
                  [](std::int64_t x) { return x == 0; }))
    throw Error(ErrorKind::InvalidInput, "character is identically zero");
  validate_on(group, values_);
}

Character Character::scaled(std::int64_t k) const {
  Character c = *this;
  for (auto &q : c.input_)
    q *= Rational(k);
  for (auto &v : c.values_)
    v *= k;
  return c;
}

Character Character::negated() const {
  Character c = *this;
  for (auto &q : c.input_)
    q = -q;
  for (auto &v : c.values_)
    v = -v;
  return c;
}

std::string Character::str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (i)
      s += ",";
    s += std::to_string(values_[i]);
  }
  return s + ")";
}

json Character::to_json() const {
  json a = json::array();
  for (auto v : values_)
    a.push_back(std::to_string(v));
  return json{{"values", a}};
}

Character Character::from_json(const Group &group, const json &j) {
  const json &arr = j.is_object() ? j.at("values") : j;
  std::vector<Rational> vals;
  for (const auto &v : arr) {
    if (v.is_string())
      vals.push_back(Rational::parse(v.get<std::string>()));
    else if (v.is_number_integer())
      vals.emplace_back(v.get<std::int64_t>());
    else
      throw Error(ErrorKind::InvalidInput, "character values must be rationals");
  }
  return Character(group, std::move(vals));
}

Rational phi_value(const Character &chi, const GroupElement &x) {
  return Rational(x.group->phi(chi, x.value));
}

// ---------------------------------------------------------------- Enumeration

std::vector<std::pair<Element, int>> enumerate_ball(
    const Group &group, int max_length, const EnumerationLimits &limits) {
  if (max_length < 0)
    throw Error(ErrorKind::InvalidInput, "word length bound must be >= 0");
  if (max_length > limits.max_length)
    throw Error(ErrorKind::BudgetExceeded,
                "word length bound exceeds configured maximum " +
                    std::to_string(limits.max_length));
  std::vector<Element> gens;
  for (int g = 0; g < group.generator_count(); ++g) {
    gens.push_back(group.generator(g, false));
    gens.push_back(group.generator(g, true));
  }
  std::unordered_set<Element, ElementHash> seen;
  std::vector<std::pair<Element, int>> out;
  std::vector<Element> frontier{group.identity()};
  seen.insert(frontier.front());
  out.emplace_back(frontier.front(), 0);
  for (int len = 1; len <= max_length; ++len) {
    std::vector<Element> next;
    for (const auto &x : frontier) {
      for (const auto &g : gens) {
        Element y = group.multiply(x, g);
        if (seen.insert(y).second) {
          if (seen.size() > limits.support_cap)
            throw Error(ErrorKind::BudgetExceeded,
                        "support enumeration exceeded cap of " +
                            std::to_string(limits.support_cap));
          out.emplace_back(y, len);
          next.push_back(std::move(y));
        }
      }
    }
    frontier = std::move(next);
  }
  return out;
}

std::vector<Element> enumerate_support(const Group &group,
                                       const Character &chi, int max_length,
                                       std::int64_t lo, std::int64_t hi,
                                       const EnumerationLimits &limits) {
  if (lo > hi)
    throw Error(ErrorKind::InvalidInput, "empty phi window");
  auto ball = enumerate_ball(group, max_length, limits);
  struct Item {
    int length;
    Word word;
    Element element;
  };
  std::vector<Item> items;
  for (auto &[e, len] : ball) {
    std::int64_t v = group.phi(chi, e);
    if (v < lo || v > hi)
      continue;
    items.push_back({len, group.canonical_word(e), std::move(e)});
  }
  std::sort(items.begin(), items.end(), [](const Item &a, const Item &b) {
    if (a.length != b.length)
      return a.length < b.length;
    return shortlex_less(a.word, b.word);
  });
  std::vector<Element> out;
  out.reserve(items.size());
  for (auto &it : items)
    out.push_back(std::move(it.element));
  return out;
}

} // namespace novikov
