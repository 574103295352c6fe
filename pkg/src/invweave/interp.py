"""Tree-walking interpreter for MiniOO.

Dynamic dispatch always selects the most-derived override, so `this`-calls
made inside original method bodies land on woven wrappers - exactly the
mechanism the per-object depth counter depends on.  Type arguments are
erased at runtime; the typechecker has already done the parametric work.

A run produces printed output lines, an optional check-event trace
(`CHECK <object-id> <class> <entry|exit|construction> <method>`, one line
per invariant evaluation), and an optional violation record when a woven
check fails, at which point execution stops.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .syntax import (
    Assign,
    Binary,
    BoolLit,
    ClassDecl,
    Expr,
    ExprStmt,
    FieldAccess,
    IfStmt,
    IntLit,
    LocalDecl,
    MethodCall,
    NamedType,
    NewObject,
    NullLit,
    PrintStmt,
    ReflectGet,
    ReturnStmt,
    SingletonRef,
    SourceUnit,
    Stmt,
    StringLit,
    SuperCall,
    SuperExpr,
    ThisExpr,
    TraceStmt,
    TypeExpr,
    Unary,
    VarRead,
    ViolationStmt,
    WhileStmt,
)
from .typecheck import ClassTable


class MiniOORuntimeError(Exception):
    """Runtime fault (null dereference, missing field, ...): aborts the run."""


@dataclass(frozen=True)
class ViolationRecord:
    class_name: str
    predicate_index: int
    phase: str  # entry | exit | construction
    method: str  # method name or "<init>"

    def __str__(self) -> str:
        return "VIOLATION %s %d %s %s" % (
            self.class_name,
            self.predicate_index,
            self.phase,
            self.method,
        )


class _Violation(Exception):
    def __init__(self, record: ViolationRecord):
        super().__init__(str(record))
        self.record = record


class _Return(Exception):
    def __init__(self, value):
        super().__init__()
        self.value = value


@dataclass
class ObjectInstance:
    class_name: str
    obj_id: int
    fields: dict[tuple[str, str], object] = field(default_factory=dict)

    def __repr__(self) -> str:
        return "%s@%d" % (self.class_name, self.obj_id)


@dataclass
class ExecutionResult:
    output: list[str]
    trace: list[str]
    violation: Optional[ViolationRecord]
    combined: list[str] = field(default_factory=list)  # output and trace, interleaved


def _zero_value(t: TypeExpr):
    if isinstance(t, NamedType):
        if t.name == "int":
            return 0
        if t.name == "bool":
            return False
        if t.name == "string":
            return ""
    return None


def stringify(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, ObjectInstance):
        return repr(value)
    return str(value)


class _Frame:
    __slots__ = ("this_obj", "lexical_class", "scopes")

    def __init__(self, this_obj: Optional[ObjectInstance], lexical_class: Optional[str]):
        self.this_obj = this_obj
        self.lexical_class = lexical_class
        self.scopes: list[dict[str, object]] = [{}]

    def push(self) -> None:
        self.scopes.append({})

    def pop(self) -> None:
        self.scopes.pop()

    def declare(self, name: str, value) -> None:
        self.scopes[-1][name] = value

    def lookup(self, name: str):
        for s in reversed(self.scopes):
            if name in s:
                return True, s[name]
        return False, None

    def assign_local(self, name: str, value) -> bool:
        for s in reversed(self.scopes):
            if name in s:
                s[name] = value
                return True
        return False


class Interpreter:
    """One execution per instance; not safe for concurrent use."""

    def __init__(self, unit: SourceUnit, trace: bool = False):
        self.unit = unit
        self.table = ClassTable(unit)
        self.trace_enabled = trace
        self.output: list[str] = []
        self.trace: list[str] = []
        self.combined: list[str] = []
        self.singletons: dict[str, ObjectInstance] = {}
        self._next_id = 0

    # -- object model -------------------------------------------------------

    def allocate(self, class_name: str) -> ObjectInstance:
        self._next_id += 1
        obj = ObjectInstance(class_name, self._next_id)
        for decl in self.table.class_chain(class_name):
            for f in decl.fields:
                obj.fields[(decl.name, f.name)] = _zero_value(f.declared_type)
        return obj

    def construct(self, class_name: str, args: list) -> ObjectInstance:
        obj = self.allocate(class_name)
        self._run_constructor(obj, class_name, args)
        return obj

    def _run_constructor(self, obj: ObjectInstance, class_name: str, args: list) -> None:
        decl = self.table.get_class(class_name)
        if decl is None:
            raise MiniOORuntimeError("unknown class %r" % class_name)
        ctor = decl.constructor
        if ctor is None:
            if decl.super_class is not None:
                self._run_constructor(obj, decl.super_class.name, [])
            return
        if len(args) != len(ctor.params):
            raise MiniOORuntimeError(
                "constructor of %s takes %d argument(s)" % (class_name, len(ctor.params))
            )
        frame = _Frame(obj, class_name)
        for p, v in zip(ctor.params, args):
            frame.declare(p.name, v)
        body = ctor.body
        explicit_super = bool(body) and isinstance(body[0], SuperCall)
        if not explicit_super and decl.super_class is not None:
            self._run_constructor(obj, decl.super_class.name, [])
        try:
            for s in body:
                self.exec_stmt(s, frame)
        except _Return:
            pass

    def _find_field_slot(self, obj: ObjectInstance, name: str) -> Optional[tuple[str, str]]:
        for decl in self.table.class_chain(obj.class_name):
            key = (decl.name, name)
            if key in obj.fields:
                return key
        return None

    def reflect_get(self, obj: ObjectInstance, name: str):
        """Visibility-blind read of the first matching field walking from the
        most-derived class upward; aborts when the chain is exhausted."""
        if obj is None:
            raise MiniOORuntimeError("null dereference in reflective read of %r" % name)
        slot = self._find_field_slot(obj, name)
        if slot is None:
            raise MiniOORuntimeError(
                "no such field %r on %s" % (name, obj.class_name)
            )
        return obj.fields[slot]

    def singleton(self, class_name: str) -> ObjectInstance:
        if class_name not in self.singletons:
            self.singletons[class_name] = self.construct(class_name, [])
        return self.singletons[class_name]

    # -- dispatch -----------------------------------------------------------

    def dispatch_call(self, receiver: ObjectInstance, name: str, args: list):
        """Execute the most-derived override of `name` on the receiver."""
        for decl in self.table.class_chain(receiver.class_name):
            for m in decl.methods:
                if m.name == name and m.body is not None:
                    return self._run_method(receiver, decl, m, args)
        raise MiniOORuntimeError(
            "no implementation of %r on %s" % (name, receiver.class_name)
        )

    def _super_call(self, receiver: ObjectInstance, from_class: str, name: str, args: list):
        decl = self.table.get_class(from_class)
        if decl is None or decl.super_class is None:
            raise MiniOORuntimeError("no superclass for %s" % from_class)
        for anc in self.table.class_chain(decl.super_class.name):
            for m in anc.methods:
                if m.name == name and m.body is not None:
                    return self._run_method(receiver, anc, m, args)
        raise MiniOORuntimeError(
            "no implementation of %r above %s" % (name, from_class)
        )

    def _run_method(self, receiver: ObjectInstance, decl: ClassDecl, m, args: list):
        if len(args) != len(m.params):
            raise MiniOORuntimeError(
                "%s.%s takes %d argument(s)" % (decl.name, m.name, len(m.params))
            )
        frame = _Frame(receiver, decl.name)
        for p, v in zip(m.params, args):
            frame.declare(p.name, v)
        try:
            for s in m.body:
                self.exec_stmt(s, frame)
        except _Return as r:
            return r.value
        if m.return_type is not None:
            raise MiniOORuntimeError(
                "%s.%s finished without returning a value" % (decl.name, m.name)
            )
        return None

    # -- statements ----------------------------------------------------------

    def exec_block(self, body: list[Stmt], frame: _Frame) -> None:
        frame.push()
        try:
            for s in body:
                self.exec_stmt(s, frame)
        finally:
            frame.pop()

    def exec_stmt(self, s: Stmt, frame: _Frame) -> None:
        if isinstance(s, LocalDecl):
            value = (
                _zero_value(s.decl_type) if s.init is None else self.eval(s.init, frame)
            )
            frame.declare(s.name, value)
        elif isinstance(s, Assign):
            value = self.eval(s.value, frame)
            self._assign(s.target, value, frame)
        elif isinstance(s, IfStmt):
            if self._truthy(self.eval(s.cond, frame), s):
                self.exec_block(s.then_body, frame)
            elif s.else_body is not None:
                self.exec_block(s.else_body, frame)
        elif isinstance(s, WhileStmt):
            while self._truthy(self.eval(s.cond, frame), s):
                self.exec_block(s.body, frame)
        elif isinstance(s, ReturnStmt):
            raise _Return(None if s.value is None else self.eval(s.value, frame))
        elif isinstance(s, ExprStmt):
            self.eval(s.expr, frame)
        elif isinstance(s, PrintStmt):
            line = stringify(self.eval(s.value, frame))
            self.output.append(line)
            self.combined.append(line)
        elif isinstance(s, SuperCall):
            if frame.this_obj is None or frame.lexical_class is None:
                raise MiniOORuntimeError("super(...) outside a constructor")
            decl = self.table.get_class(frame.lexical_class)
            if decl is None or decl.super_class is None:
                raise MiniOORuntimeError("super(...) with no superclass")
            args = [self.eval(a, frame) for a in s.args]
            self._run_constructor(frame.this_obj, decl.super_class.name, args)
        elif isinstance(s, TraceStmt):
            if self.trace_enabled:
                obj = self.eval(s.obj, frame)
                if not isinstance(obj, ObjectInstance):
                    raise MiniOORuntimeError("@trace target is not an object")
                cls = self.eval(s.check_class, frame)
                phase = self.eval(s.phase, frame)
                method = self.eval(s.method, frame)
                line = "CHECK %d %s %s %s" % (obj.obj_id, cls, phase, method)
                self.trace.append(line)
                self.combined.append(line)
        elif isinstance(s, ViolationStmt):
            record = ViolationRecord(
                class_name=str(self.eval(s.check_class, frame)),
                predicate_index=int(self.eval(s.index, frame)),  # type: ignore[arg-type]
                phase=str(self.eval(s.phase, frame)),
                method=str(self.eval(s.method, frame)),
            )
            raise _Violation(record)
        else:
            raise MiniOORuntimeError("unknown statement %r" % type(s).__name__)

    def _assign(self, target: Expr, value, frame: _Frame) -> None:
        if isinstance(target, VarRead):
            if frame.assign_local(target.name, value):
                return
            if frame.this_obj is not None:
                slot = self._find_field_slot(frame.this_obj, target.name)
                if slot is not None:
                    frame.this_obj.fields[slot] = value
                    return
            raise MiniOORuntimeError("unknown variable %r" % target.name)
        if isinstance(target, FieldAccess):
            obj = self.eval(target.obj, frame)
            if obj is None:
                raise MiniOORuntimeError("null dereference writing %r" % target.name)
            if not isinstance(obj, ObjectInstance):
                raise MiniOORuntimeError("%r has no fields" % obj)
            slot = self._find_field_slot(obj, target.name)
            if slot is None:
                raise MiniOORuntimeError(
                    "no such field %r on %s" % (target.name, obj.class_name)
                )
            obj.fields[slot] = value
            return
        raise MiniOORuntimeError("invalid assignment target")

    @staticmethod
    def _truthy(value, node) -> bool:
        if not isinstance(value, bool):
            raise MiniOORuntimeError("condition is not a bool")
        return value

    # -- expressions ----------------------------------------------------------

    def eval(self, e: Expr, frame: _Frame):
        if isinstance(e, IntLit):
            return e.value
        if isinstance(e, BoolLit):
            return e.value
        if isinstance(e, StringLit):
            return e.value
        if isinstance(e, NullLit):
            return None
        if isinstance(e, ThisExpr):
            if frame.this_obj is None:
                raise MiniOORuntimeError("this outside a method")
            return frame.this_obj
        if isinstance(e, VarRead):
            found, value = frame.lookup(e.name)
            if found:
                return value
            if frame.this_obj is not None:
                slot = self._find_field_slot(frame.this_obj, e.name)
                if slot is not None:
                    return frame.this_obj.fields[slot]
            raise MiniOORuntimeError("unknown variable %r" % e.name)
        if isinstance(e, FieldAccess):
            obj = self.eval(e.obj, frame)
            if obj is None:
                raise MiniOORuntimeError("null dereference reading %r" % e.name)
            if not isinstance(obj, ObjectInstance):
                raise MiniOORuntimeError("%r has no fields" % obj)
            slot = self._find_field_slot(obj, e.name)
            if slot is None:
                raise MiniOORuntimeError(
                    "no such field %r on %s" % (e.name, obj.class_name)
                )
            return obj.fields[slot]
        if isinstance(e, MethodCall):
            return self._eval_call(e, frame)
        if isinstance(e, NewObject):
            args = [self.eval(a, frame) for a in e.args]
            return self.construct(e.type.name, args)
        if isinstance(e, Binary):
            return self._eval_binary(e, frame)
        if isinstance(e, Unary):
            v = self.eval(e.operand, frame)
            if e.op == "!":
                return not v
            return -v
        if isinstance(e, ReflectGet):
            obj = self.eval(e.obj, frame)
            if not isinstance(obj, ObjectInstance):
                raise MiniOORuntimeError(
                    "null dereference in reflective read of %r" % e.field_name
                    if obj is None
                    else "reflective read on a non-object"
                )
            return self.reflect_get(obj, e.field_name)
        if isinstance(e, SingletonRef):
            return self.singleton(e.class_name)
        if isinstance(e, SuperExpr):
            raise MiniOORuntimeError("super outside a call")
        raise MiniOORuntimeError("unknown expression %r" % type(e).__name__)

    def _eval_call(self, e: MethodCall, frame: _Frame):
        args = [self.eval(a, frame) for a in e.args]
        if isinstance(e.receiver, SuperExpr):
            if frame.this_obj is None or frame.lexical_class is None:
                raise MiniOORuntimeError("super call outside a method")
            return self._super_call(frame.this_obj, frame.lexical_class, e.name, args)
        if e.receiver is None:
            receiver = frame.this_obj
            if receiver is None:
                raise MiniOORuntimeError("call of %r outside a class" % e.name)
        else:
            receiver = self.eval(e.receiver, frame)
        if receiver is None:
            raise MiniOORuntimeError("null dereference calling %r" % e.name)
        if not isinstance(receiver, ObjectInstance):
            raise MiniOORuntimeError("%r has no methods" % receiver)
        return self.dispatch_call(receiver, e.name, args)

    def _eval_binary(self, e: Binary, frame: _Frame):
        op = e.op
        if op == "&&":
            left = self.eval(e.left, frame)
            if not left:
                return False
            return bool(self.eval(e.right, frame))
        if op == "||":
            left = self.eval(e.left, frame)
            if left:
                return True
            return bool(self.eval(e.right, frame))
        left = self.eval(e.left, frame)
        right = self.eval(e.right, frame)
        if op == "==":
            return self._equal(left, right)
        if op == "!=":
            return not self._equal(left, right)
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        if op == ">=":
            return left >= right
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "/":
            if right == 0:
                raise MiniOORuntimeError("division by zero")
            q = abs(left) // abs(right)
            return -q if (left < 0) != (right < 0) else q
        raise MiniOORuntimeError("unknown operator %r" % op)

    @staticmethod
    def _equal(left, right) -> bool:
        if isinstance(left, ObjectInstance) or isinstance(right, ObjectInstance):
            return left is right
        return left == right

    # -- entry point ------------------------------------------------------------

    def run(self) -> ExecutionResult:
        if self.unit.driver is None:
            raise MiniOORuntimeError("no driver block to execute")
        frame = _Frame(None, None)
        try:
            for s in self.unit.driver.body:
                self.exec_stmt(s, frame)
        except _Violation as v:
            return ExecutionResult(self.output, self.trace, v.record, self.combined)
        return ExecutionResult(self.output, self.trace, None, self.combined)


def run_program(unit: SourceUnit, check_trace: bool = False) -> ExecutionResult:
    """Execute the unit's driver block.  Invariant violations stop execution
    and are returned in the result; runtime faults raise MiniOORuntimeError."""
    return Interpreter(unit, trace=check_trace).run()
