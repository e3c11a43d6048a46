#pragma once

// Standing example programs shared across test suites: a small numeric tower
// (Zero/Succ under Nat under Int) and a list pair whose methods exercise
// inheritance, overriding, and numeric sugar.

namespace cocofj::fixtures {

inline const char* kCore = R"(
class Int extends Object {
  Int() { super(); }
}
class Nat extends Int {
  Nat() { super(); }
  Nat plus(Nat other) { return other; }
}
class Zero extends Nat {
  Zero() { super(); }
}
class Succ extends Nat {
  Nat val;
  Succ(Nat val) { super(); this.val = val; }
}
class List extends Object {
  List() { super(); }
  Int size() { return 0; }
  List add(Int a) { return this; }
}
class LinkedList extends List {
  LinkedList() { super(); }
}
)";

} // namespace cocofj::fixtures
