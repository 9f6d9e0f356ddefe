# # From raw source files to training pairs
#
# This walkthrough takes a small directory of Python modules and turns it
# into description/code training pairs. Two stages do the work: extraction
# pulls every function definition (including nested functions, async
# functions, and lambdas) out of each file, and curation cleans the
# docstring into a one-line description, strips the body down to canonical
# code, and rejects anything that fails a quality filter.

import tempfile
from pathlib import Path

from corpusqc import CuratedPair, curate, iter_corpus

# ## A miniature corpus
#
# Three modules, written to a temporary directory. The first two hold
# reasonable functions; the third collects typical rejects: a function with
# no docstring, one whose docstring is too short to describe anything, and
# a stub that was never implemented.

MODULE_A = '''
"""Order helpers."""


def order_total(prices, quantities):
    """Compute the total order price by pairing each unit price with its
    ordered quantity."""
    return sum(p * q for p, q in zip(prices, quantities))


def apply_discount(total, percent):
    """Reduce the given order total by a percentage expressed as a number
    between zero and one hundred."""
    return total * (1 - percent / 100.0)
'''

MODULE_B = '''
def rolling_mean(values, width):
    """Average the values over a sliding window of the given width and
    collect one result per full window."""
    out = []
    for i in range(len(values) - width + 1):
        window = values[i : i + width]
        out.append(sum(window) / width)
    return out
'''

MODULE_C = '''
def mystery(x):
    return x * 2


def brief(x):
    """Too short."""
    return x


def unfinished(x):
    """Placeholder body that still needs to be written by somebody later
    on in the project."""
    pass
'''

workdir = Path(tempfile.mkdtemp(prefix="corpusqc-demo-"))
for name, text in [("a.py", MODULE_A), ("b.py", MODULE_B), ("c.py", MODULE_C)]:
    (workdir / name).write_text(text, encoding="utf-8")

# ## Extraction
#
# iter_corpus walks the files in sorted order and yields one result per
# file. Each extracted function carries its id, location, signature, raw
# docstring, and body; files that fail to parse would show up as rejects
# instead of silently disappearing.

functions = []
for result in iter_corpus([workdir]):
    print(f"{Path(result.path).name}: {len(result.functions)} functions")
    functions.extend(result.functions)

print()
for func in functions:
    print(f"  {func.name:<15} lines {func.start_line}-{func.end_line}")

# ## Curation
#
# curate() streams over the extracted functions and yields either a
# CuratedPair (description + signature + cleaned code) or a reject record
# naming the first filter the function failed.

print()
pairs = []
for item in curate(functions):
    if isinstance(item, CuratedPair):
        pairs.append(item)
        print(f"kept    {item.func_id[:8]}  {item.description[:60]}")
    else:
        print(f"reject  {item.func_id[:8]}  stage={item.stage}")

# The kept pairs are what a code model would train on: the description and
# signature form the prompt, the cleaned body is the completion.

print()
example = pairs[0]
print("prompt:")
print(example.description)
print(example.signature)
print("completion:")
print(example.code)
