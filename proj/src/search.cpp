#include <atomic>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "pavelka/error.hpp"
#include "pavelka/types.hpp"

namespace pavelka {

void SearchSpace::check() const {
  if (max_size < 1) throw Error(ErrorKind::InvalidArgument, "search max_size must be at least 1");
  if (max_size > 8) throw Error(ErrorKind::SearchTooLarge, "search max_size above 8 is not supported");
  if (truth_grid < 1) throw Error(ErrorKind::InvalidArgument, "truth grid must be at least 1");
  if (metric_grid < 1) throw Error(ErrorKind::InvalidArgument, "metric grid must be at least 1");
}

namespace {

constexpr std::uint64_t kLimit = std::uint64_t{1} << 62;

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 r = static_cast<unsigned __int128>(a) * b;
  if (r > kLimit) throw Error(ErrorKind::SearchTooLarge, "search space too large to enumerate");
  return static_cast<std::uint64_t>(r);
}

std::uint64_t power(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) r = checked_mul(r, base);
  return r;
}

// Fisher-Yates with a fixed generator so orders match on every platform.
std::vector<std::uint32_t> permutation(std::uint32_t size, std::uint64_t seed, std::uint64_t salt) {
  std::vector<std::uint32_t> p(size);
  for (std::uint32_t i = 0; i < size; ++i) p[i] = i;
  if (seed == 0) return p;
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + salt);
  for (std::uint32_t i = size; i > 1; --i) std::swap(p[i - 1], p[rng() % i]);
  return p;
}

// Every metric on `size` points with off-diagonal values in {1/h, ..., 1}, in
// lexicographic order of the upper triangle (row-major).
std::vector<std::vector<Rational>> grid_metrics(int size, int h) {
  const auto n = static_cast<std::size_t>(size);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.push_back({i, j});
  }
  std::vector<std::vector<Rational>> out;
  std::vector<int> digit(pairs.size(), 1);
  while (true) {
    std::vector<int> d(n * n, 0);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      d[pairs[p].first * n + pairs[p].second] = digit[p];
      d[pairs[p].second * n + pairs[p].first] = digit[p];
    }
    bool ok = true;
    for (std::size_t a = 0; a < n && ok; ++a) {
      for (std::size_t b = 0; b < n && ok; ++b) {
        for (std::size_t c = 0; c < n && ok; ++c) ok = d[a * n + c] <= d[a * n + b] + d[b * n + c];
      }
    }
    if (ok) {
      std::vector<Rational> m;
      for (int v : d) m.push_back(Rational(v, h));
      out.push_back(std::move(m));
    }
    std::size_t p = pairs.size();
    while (p > 0 && digit[p - 1] == h) digit[--p] = 1;
    if (p == 0) break;
    ++digit[p - 1];
  }
  return out;
}

struct Layout {
  int size;
  std::vector<std::vector<Rational>> metrics;
  std::vector<std::uint32_t> metric_order;
  std::vector<std::uint32_t> truth_order;
  std::vector<std::uint32_t> element_order;
  std::vector<std::pair<std::string, std::size_t>> predicate_entries; // (symbol, tuple index)
  std::vector<std::pair<std::string, std::size_t>> operation_entries;
  std::vector<std::uint64_t> radix; // metric, predicate entries, operation entries
  std::uint64_t total = 1;
};

Layout make_layout(const SearchSpace& space, int size) {
  Layout l;
  l.size = size;
  l.metrics = grid_metrics(size, space.metric_grid);
  l.metric_order = permutation(static_cast<std::uint32_t>(l.metrics.size()), space.seed, 1);
  l.truth_order = permutation(static_cast<std::uint32_t>(space.truth_grid + 1), space.seed, 2);
  l.element_order = permutation(static_cast<std::uint32_t>(size), space.seed, 3);
  l.radix.push_back(l.metrics.size());
  for (const auto& [name, arity] : space.vocabulary.predicates()) {
    std::uint64_t count = power(static_cast<std::uint64_t>(size), static_cast<std::uint64_t>(arity));
    for (std::uint64_t i = 0; i < count; ++i) {
      l.predicate_entries.push_back({name, static_cast<std::size_t>(i)});
      l.radix.push_back(static_cast<std::uint64_t>(space.truth_grid + 1));
    }
  }
  for (const auto& [name, arity] : space.vocabulary.operations()) {
    std::uint64_t count = power(static_cast<std::uint64_t>(size), static_cast<std::uint64_t>(arity));
    for (std::uint64_t i = 0; i < count; ++i) {
      l.operation_entries.push_back({name, static_cast<std::size_t>(i)});
      l.radix.push_back(static_cast<std::uint64_t>(size));
    }
  }
  for (std::uint64_t r : l.radix) l.total = checked_mul(l.total, r);
  return l;
}

Structure blank(const SearchSpace& space, int size) {
  std::vector<std::string> names;
  for (int i = 0; i < size; ++i) names.push_back("e" + std::to_string(i));
  Structure m(names);
  for (const auto& [name, arity] : space.vocabulary.predicates()) m.add_predicate(name, arity);
  for (const auto& [name, arity] : space.vocabulary.operations()) m.add_operation(name, arity);
  return m;
}

void decode(const Layout& l, std::uint64_t index, std::vector<std::uint64_t>& digits) {
  digits.assign(l.radix.size(), 0);
  for (std::size_t i = l.radix.size(); i-- > 0;) {
    digits[i] = index % l.radix[i];
    index /= l.radix[i];
  }
}

void apply(const Layout& l, const std::vector<std::uint64_t>& digits, int truth_grid, Structure& m) {
  const auto& metric = l.metrics[l.metric_order[digits[0]]];
  const auto n = static_cast<Element>(l.size);
  for (Element a = 0; a < n; ++a) {
    for (Element b = 0; b < n; ++b) m.set_distance(a, b, metric[a * n + b]);
  }
  std::size_t d = 1;
  for (const auto& [name, index] : l.predicate_entries) {
    m.predicate_table(name).values[index] = Rational(l.truth_order[digits[d++]], truth_grid);
  }
  for (const auto& [name, index] : l.operation_entries) {
    m.operation_table(name).values[index] = l.element_order[digits[d++]];
  }
}

void collect_constants(const Formula& f, std::vector<Rational>& out) {
  switch (f.kind()) {
  case FormulaKind::Constant: out.push_back(f.value()); return;
  case FormulaKind::AtMost:
  case FormulaKind::AtLeast:
    out.push_back(f.value());
    collect_constants(f.operand(), out);
    return;
  case FormulaKind::Not: collect_constants(f.operand(), out); return;
  case FormulaKind::Implies:
  case FormulaKind::Or:
  case FormulaKind::And:
    collect_constants(f.lhs(), out);
    collect_constants(f.rhs(), out);
    return;
  case FormulaKind::Exists:
  case FormulaKind::Forall: collect_constants(f.body(), out); return;
  default: return;
  }
}

} // namespace

std::uint64_t search_space_size(const SearchSpace& space, int size) {
  space.check();
  return make_layout(space, size).total;
}

SearchResult search_model(const SearchSpace& space, const Theory& theory, std::span<const TypeSet> types,
                          int workers) {
  space.check();
  for (const auto& s : theory.sentences) {
    check_formula(s, space.vocabulary);
    if (!is_sentence(s)) throw Error(ErrorKind::NotSentence, "theory member is not a sentence: " + render(s));
    std::vector<Rational> constants;
    collect_constants(s, constants);
    for (const auto& r : constants) {
      if (!(r * Rational(space.truth_grid)).is_integer()) {
        throw Error(ErrorKind::Resolution, "truth grid 1/" + std::to_string(space.truth_grid) +
                                               " cannot represent the constant " + r.str() + " in " + render(s));
      }
    }
  }
  for (const auto& t : types) {
    t.check();
    for (const auto& f : t.formulas) check_formula(f, space.vocabulary);
  }
  workers = std::max(1, workers);

  SearchResult result;
  for (int size = 1; size <= space.max_size; ++size) {
    const Layout layout = make_layout(space, size);
    const Structure proto = blank(space, size);
    std::atomic<std::uint64_t> best{layout.total};
    std::atomic<std::uint64_t> next_chunk{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const std::uint64_t chunk = 64;

    auto work = [&] {
      try {
        Structure m = proto;
        std::vector<std::uint64_t> digits;
        while (true) {
          const std::uint64_t start = next_chunk.fetch_add(1) * chunk;
          if (start >= layout.total || start >= best.load()) return;
          const std::uint64_t stop = std::min(layout.total, start + chunk);
          for (std::uint64_t i = start; i < stop && i < best.load(); ++i) {
            decode(layout, i, digits);
            apply(layout, digits, space.truth_grid, m);
            Evaluator ev(m);
            if (!check_theory(ev, theory).satisfied) continue;
            bool all_omitted = true;
            for (const auto& t : types) {
              if (!omits(ev, t).omitted) {
                all_omitted = false;
                break;
              }
            }
            if (!all_omitted) continue;
            std::uint64_t seen = best.load();
            while (i < seen && !best.compare_exchange_weak(seen, i)) {
            }
            return;
          }
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        best.store(0);
      }
    };

    if (workers == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    const std::uint64_t found = best.load();
    if (found < layout.total) {
      Structure m = proto;
      std::vector<std::uint64_t> digits;
      decode(layout, found, digits);
      apply(layout, digits, space.truth_grid, m);
      result.model = std::move(m);
      result.examined += found + 1;
      return result;
    }
    result.examined += layout.total;
  }
  return result;
}

} // namespace pavelka
