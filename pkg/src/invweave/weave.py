"""Generation of exposure interfaces, exposed classes, and the invariant
visitor, as subject-language ASTs.

For every class A with a specification entry the weaver emits:

  - `interface IExposedA<...>`: one raw getter signature per field that is
    not already exposed through a specified ancestor; the interface extends
    the superclass's exposure interface with the same arguments the class
    hierarchy uses, so the interface hierarchy mirrors the original one;
  - `class ExposedA<...> extends A<...> implements IExposedA<...>`: a
    per-object call-depth counter, entry/exit gate methods, an `inv()` hook
    that delegates to the shared visitor instance, a constructor mirroring
    A's, one overriding wrapper per public method reachable on A (its own
    and every ancestor's, since exposed classes are deliberately unrelated
    by inheritance), and getter implementations for the interface chain;
  - one `class InvV`: per specified class a `visit_<A>` method that first
    delegates to the superclass's visit through the super-interface, then
    binds each free variable via its getter and evaluates the predicates in
    order, recording the first failure.

Checks fire only when the depth counter is zero, which makes them coincide
with publicly-visible calls; nested self-calls are suppressed.  Invariant
failures abort the run with a violation record (class, predicate index,
phase, method).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .diagnostics import Diagnostic, WeaveError, errors_only
from .exposure import (
    ExposurePlan,
    class_free_vars_ordered,
    compute_plan,
    verify_exposure,
)
from .invspec import Forall, InvariantSpec, Predicate, type_predicate, validate_spec
from .printer import render_source
from .subst import NameSupply
from .syntax import (
    Assign,
    Binary,
    BoolLit,
    ClassDecl,
    ConstructorDecl,
    Expr,
    ExprStmt,
    FieldAccess,
    FieldDecl,
    IfStmt,
    IntLit,
    InterfaceDecl,
    LocalDecl,
    MethodCall,
    MethodDecl,
    NamedType,
    NewObject,
    NullLit,
    Param,
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
    TypeVar,
    Unary,
    VarRead,
    ViolationStmt,
    WhileStmt,
)
from .typecheck import ClassTable, typecheck_program

PHASE_ENTRY = "entry"
PHASE_EXIT = "exit"
PHASE_CONSTRUCTION = "construction"
CONSTRUCTOR_METHOD = "<init>"

VISITOR_BASE_NAME = "InvV"

_STRING_T = NamedType("string")
_INT_T = NamedType("int")
_BOOL_T = NamedType("bool")


@dataclass
class WeaveNaming:
    interface_names: dict[str, str] = field(default_factory=dict)
    exposed_names: dict[str, str] = field(default_factory=dict)
    getter_names: dict[tuple[str, str], str] = field(default_factory=dict)
    visitor_name: str = VISITOR_BASE_NAME

    def getter(self, introducing_class: str, field_name: str) -> str:
        return self.getter_names[(introducing_class, field_name)]


@dataclass
class GenerationReport:
    per_class: dict[str, dict[str, int]] = field(default_factory=dict)
    depth: int = 0
    max_new_members: int = 0
    formula_bound: int = 0

    def measured_redundant(self) -> int:
        return sum(v["inherited_members"] for v in self.per_class.values())

    def within_bound(self) -> bool:
        return self.measured_redundant() <= self.formula_bound

    def to_json(self) -> str:
        data = {
            "per_class": self.per_class,
            "depth": self.depth,
            "max_new_members": self.max_new_members,
            "formula_bound": self.formula_bound,
        }
        return json.dumps(data, indent=2) + "\n"


@dataclass
class WovenArtifacts:
    interfaces: list[InterfaceDecl]
    exposed_classes: list[ClassDecl]
    visitor: ClassDecl
    report: GenerationReport
    naming: WeaveNaming
    source_unit: SourceUnit
    spec: InvariantSpec

    def declarations_unit(self) -> SourceUnit:
        return SourceUnit(
            classes=list(self.exposed_classes) + [self.visitor],
            interfaces=list(self.interfaces),
        )

    def merged_unit(self) -> SourceUnit:
        return SourceUnit(
            classes=list(self.source_unit.classes)
            + list(self.exposed_classes)
            + [self.visitor],
            interfaces=list(self.source_unit.interfaces) + list(self.interfaces),
            driver=self.source_unit.driver,
        )


# ---------------------------------------------------------------------------
# Naming
# ---------------------------------------------------------------------------


def _specified_in_unit_order(unit: SourceUnit, spec: InvariantSpec) -> list[ClassDecl]:
    return [c for c in unit.classes if spec.specifies(c.name)]


def _specified_super_name(table: ClassTable, spec: InvariantSpec, c: ClassDecl) -> str | None:
    if c.super_class is None or not spec.specifies(c.super_class.name):
        return None
    return c.super_class.name


def choose_names(unit: SourceUnit, spec: InvariantSpec, plan: ExposurePlan) -> WeaveNaming:
    table = ClassTable(unit)
    naming = WeaveNaming()
    top_level = {c.name for c in unit.classes} | {i.name for i in unit.interfaces}
    supply = NameSupply(set(top_level))
    for c in _specified_in_unit_order(unit, spec):
        iface = "IExposed" + c.name
        naming.interface_names[c.name] = iface if iface not in supply.taken else supply.fresh(iface)
        supply.reserve(naming.interface_names[c.name])
        exposed = "Exposed" + c.name
        naming.exposed_names[c.name] = (
            exposed if exposed not in supply.taken else supply.fresh(exposed)
        )
        supply.reserve(naming.exposed_names[c.name])
    naming.visitor_name = (
        VISITOR_BASE_NAME
        if VISITOR_BASE_NAME not in supply.taken
        else supply.fresh(VISITOR_BASE_NAME)
    )
    supply.reserve(naming.visitor_name)

    all_method_names = {m.name for c in unit.classes for m in c.methods}
    all_method_names |= {m.name for i in unit.interfaces for m in i.methods}
    getter_supply = NameSupply(set(all_method_names))
    # Parents first so chain-uniqueness can consult ancestors' getter names.
    ordered = sorted(
        _specified_in_unit_order(unit, spec),
        key=lambda c: len(table.class_chain(c.name)),
    )
    for c in ordered:
        chain_taken: set[str] = set()
        anc = _specified_super_name(table, spec, c)
        while anc is not None:
            entry = plan.per_class[anc]
            for fname, _ in entry.own_signatures:
                chain_taken.add(naming.getter_names[(anc, fname)])
            anc_decl = table.get_class(anc)
            anc = _specified_super_name(table, spec, anc_decl) if anc_decl else None
        for fname, _ in plan.per_class[c.name].own_signatures:
            base = "_get_" + fname
            if base in all_method_names or base in chain_taken:
                name = getter_supply.fresh(base)
            else:
                name = base
            chain_taken.add(name)
            naming.getter_names[(c.name, fname)] = name
    return naming


def _member_names(table: ClassTable, c: ClassDecl) -> tuple[set[str], set[str]]:
    """(field names, method names) over the whole chain of c."""
    fields: set[str] = set()
    methods: set[str] = set()
    for anc in table.class_chain(c.name):
        fields |= {f.name for f in anc.fields}
        methods |= {m.name for m in anc.methods}
    for inst in table.closure(c.self_type()):
        idecl = table.get_interface(inst.name)
        if idecl is not None:
            methods |= {m.name for m in idecl.methods}
    return fields, methods


@dataclass
class _HookNames:
    depth: str
    check_entry: str
    check_exit: str
    inv: str


def _hook_names(table: ClassTable, c: ClassDecl, getter_names: set[str]) -> _HookNames:
    fields, methods = _member_names(table, c)
    supply = NameSupply(set(fields | methods | getter_names))
    depth = "_depth" if "_depth" not in fields else supply.fresh("_depth")

    def pick(base: str) -> str:
        if base not in methods and base not in getter_names:
            supply.reserve(base)
            return base
        return supply.fresh(base)

    return _HookNames(
        depth=depth,
        check_entry=pick("_check_entry"),
        check_exit=pick("_check_exit"),
        inv=pick("inv"),
    )


# ---------------------------------------------------------------------------
# Small AST builders
# ---------------------------------------------------------------------------


def _this_field(name: str) -> FieldAccess:
    return FieldAccess(ThisExpr(), name)


def _this_call(name: str, args: list[Expr]) -> MethodCall:
    return MethodCall(ThisExpr(), name, args)


def _depth_is_zero(depth: str) -> Binary:
    return Binary("==", _this_field(depth), IntLit(0))


def _bump_depth(depth: str, delta: int) -> Assign:
    op = "+" if delta > 0 else "-"
    return Assign(
        _this_field(depth), Binary(op, _this_field(depth), IntLit(abs(delta)))
    )


def _fail_block(visitor_name: str, phase: Expr, method: Expr) -> list[Stmt]:
    return [
        LocalDecl(NamedType(visitor_name), "v", SingletonRef(visitor_name)),
        ViolationStmt(
            MethodCall(VarRead("v"), "failed_class", []),
            MethodCall(VarRead("v"), "failed_index", []),
            phase,
            method,
        ),
    ]


# ---------------------------------------------------------------------------
# Interface generation
# ---------------------------------------------------------------------------


def gen_exposure_interface(
    c: ClassDecl,
    plan: ExposurePlan,
    naming: WeaveNaming,
    table: ClassTable,
    spec: InvariantSpec,
) -> InterfaceDecl:
    entry = plan.per_class[c.name]
    extends: list[NamedType] = []
    sup_name = _specified_super_name(table, spec, c)
    if sup_name is not None:
        assert c.super_class is not None
        extends.append(NamedType(naming.interface_names[sup_name], c.super_class.args))
    methods = [
        MethodDecl(
            name=naming.getter(c.name, fname),
            visibility="public",
            params=[],
            return_type=ftype,
            body=None,
        )
        for fname, ftype in entry.own_signatures
    ]
    return InterfaceDecl(
        name=naming.interface_names[c.name],
        type_params=list(c.type_params),
        extends=extends,
        methods=methods,
    )


# ---------------------------------------------------------------------------
# Exposed class generation
# ---------------------------------------------------------------------------


@dataclass
class _ClassStats:
    getters: int = 0
    wrappers: int = 0
    inherited_members: int = 0


def _interface_chain(
    table: ClassTable, spec: InvariantSpec, c: ClassDecl
) -> list[str]:
    """Specified classes whose interfaces ExposedC implements, root first."""
    chain: list[str] = []
    cur: ClassDecl | None = c
    while cur is not None:
        chain.append(cur.name)
        sup = _specified_super_name(table, spec, cur)
        cur = table.get_class(sup) if sup is not None else None
    chain.reverse()
    return chain


def _public_methods_to_wrap(
    table: ClassTable, c: ClassDecl
) -> list[tuple[str, MethodDecl, str]]:
    """(name, most-derived declaration, declaring class) for every public
    method with an implementation anywhere on c's chain, in chain order."""
    out: list[tuple[str, MethodDecl, str]] = []
    seen: set[str] = set()
    for anc in table.class_chain(c.name):
        for m in anc.methods:
            if m.name in seen:
                continue
            seen.add(m.name)
            if m.visibility != "public":
                continue
            if table.find_impl(c.self_type(), m.name) is None:
                continue
            out.append((m.name, m, anc.name))
    return out


def gen_exposed_class(
    c: ClassDecl,
    iface: InterfaceDecl,
    spec: InvariantSpec,
    naming: WeaveNaming,
    table: ClassTable,
    plan: ExposurePlan,
    stats: _ClassStats | None = None,
) -> ClassDecl:
    hooks = _hook_names(
        table, c, {naming.getter(cn, fn) for (cn, fn) in naming.getter_names}
    )
    stats = stats if stats is not None else _ClassStats()
    self_params = list(c.type_params)
    self_args = tuple(TypeVar(p) for p in self_params)
    exposed_name = naming.exposed_names[c.name]
    visitor = naming.visitor_name
    cls_lit = StringLit(c.name)

    # (2) entry gate: check when the depth counter is zero, then increment.
    check_entry = MethodDecl(
        name=hooks.check_entry,
        visibility="private",
        params=[Param("m", _STRING_T)],
        return_type=None,
        body=[
            IfStmt(
                _depth_is_zero(hooks.depth),
                [
                    TraceStmt(ThisExpr(), cls_lit, StringLit(PHASE_ENTRY), VarRead("m")),
                    IfStmt(
                        Unary("!", _this_call(hooks.inv, [])),
                        _fail_block(visitor, StringLit(PHASE_ENTRY), VarRead("m")),
                        None,
                    ),
                ],
                None,
            ),
            _bump_depth(hooks.depth, +1),
        ],
    )
    # (3) exit gate: decrement, then check when the counter returns to zero.
    check_exit = MethodDecl(
        name=hooks.check_exit,
        visibility="private",
        params=[Param("phase", _STRING_T), Param("m", _STRING_T)],
        return_type=None,
        body=[
            _bump_depth(hooks.depth, -1),
            IfStmt(
                _depth_is_zero(hooks.depth),
                [
                    TraceStmt(ThisExpr(), cls_lit, VarRead("phase"), VarRead("m")),
                    IfStmt(
                        Unary("!", _this_call(hooks.inv, [])),
                        _fail_block(visitor, VarRead("phase"), VarRead("m")),
                        None,
                    ),
                ],
                None,
            ),
        ],
    )
    # (4) the accept hook: delegate to the shared visitor and read the verdict.
    inv = MethodDecl(
        name=hooks.inv,
        visibility="protected",
        params=[],
        return_type=_BOOL_T,
        body=[
            LocalDecl(NamedType(visitor), "v", SingletonRef(visitor)),
            ExprStmt(MethodCall(VarRead("v"), "reset", [])),
            ExprStmt(MethodCall(VarRead("v"), "visit_" + c.name, [ThisExpr()])),
            ReturnStmt(MethodCall(VarRead("v"), "valid", [])),
        ],
    )
    # (5) constructor: run the original construction, then one exit-style
    # check in the construction phase.
    ctor_params = list(c.constructor.params) if c.constructor is not None else []
    constructor = ConstructorDecl(
        visibility="public",
        params=[Param(p.name, p.type) for p in ctor_params],
        body=[
            SuperCall([VarRead(p.name) for p in ctor_params]),
            _bump_depth(hooks.depth, +1),
            ExprStmt(
                _this_call(
                    hooks.check_exit,
                    [StringLit(PHASE_CONSTRUCTION), StringLit(CONSTRUCTOR_METHOD)],
                )
            ),
        ],
    )
    # (6) wrappers for every public method on the chain.
    wrappers: list[MethodDecl] = []
    for name, _decl, declaring in _public_methods_to_wrap(table, c):
        hit = table.find_method(c.self_type(), name)
        assert hit is not None
        result_name = "_result"
        while any(p.name == result_name for p in hit.method.params):
            result_name = "_" + result_name
        call = MethodCall(SuperExpr(), name, [VarRead(p.name) for p in hit.method.params])
        body: list[Stmt] = [ExprStmt(_this_call(hooks.check_entry, [StringLit(name)]))]
        if hit.return_type is None:
            body.append(ExprStmt(call))
            body.append(
                ExprStmt(
                    _this_call(hooks.check_exit, [StringLit(PHASE_EXIT), StringLit(name)])
                )
            )
        else:
            body.append(LocalDecl(hit.return_type, result_name, call))
            body.append(
                ExprStmt(
                    _this_call(hooks.check_exit, [StringLit(PHASE_EXIT), StringLit(name)])
                )
            )
            body.append(ReturnStmt(VarRead(result_name)))
        wrappers.append(
            MethodDecl(
                name=name,
                visibility="public",
                type_params=list(hit.method.type_params),
                params=[Param(p.name, t) for p, t in zip(hit.method.params, hit.param_types)],
                return_type=hit.return_type,
                body=body,
            )
        )
        stats.wrappers += 1
        if declaring != c.name:
            stats.inherited_members += 1
    # (7) getters for the whole interface chain, root-first.
    getters: list[MethodDecl] = []
    for owner in _interface_chain(table, spec, c):
        for fname, _ftype in plan.per_class[owner].own_signatures:
            hit = table.find_field(c.self_type(), fname)
            assert hit is not None
            if hit.field.visibility == "private":
                read: Expr = ReflectGet(ThisExpr(), fname)
            else:
                read = _this_field(fname)
            getters.append(
                MethodDecl(
                    name=naming.getter(owner, fname),
                    visibility="public",
                    params=[],
                    return_type=hit.type,
                    body=[ReturnStmt(read)],
                )
            )
            stats.getters += 1
            if owner != c.name:
                stats.inherited_members += 1

    return ClassDecl(
        name=exposed_name,
        type_params=self_params,
        super_class=NamedType(c.name, self_args),
        interfaces=[NamedType(iface.name, self_args)],
        is_abstract=c.is_abstract,
        fields=[FieldDecl(hooks.depth, _INT_T, "private")],
        constructor=constructor,
        methods=[check_entry, check_exit, inv] + wrappers + getters,
    )


# ---------------------------------------------------------------------------
# Visitor generation
# ---------------------------------------------------------------------------


def _compile_predicate_expr(e: Expr) -> Expr:
    """Predicate expression -> checker expression: root identifiers stay as
    local reads (bound from getters), navigation becomes reflective reads."""
    if isinstance(e, FieldAccess):
        return ReflectGet(_compile_predicate_expr(e.obj), e.name)
    if isinstance(e, Binary):
        return Binary(e.op, _compile_predicate_expr(e.left), _compile_predicate_expr(e.right))
    if isinstance(e, Unary):
        return Unary(e.op, _compile_predicate_expr(e.operand))
    if isinstance(e, (VarRead, IntLit, BoolLit, StringLit, NullLit)):
        return e
    raise TypeError("unexpected predicate node %r" % type(e).__name__)


def _record_call(class_name: str, index: int) -> Stmt:
    return ExprStmt(_this_call("_record", [StringLit(class_name), IntLit(index)]))


def _ok_read() -> Expr:
    return FieldAccess(ThisExpr(), "_ok")


def _predicate_stmts(
    class_name: str,
    index: int,
    pred: Predicate,
    qtypes: dict[str, TypeExpr],
) -> list[Stmt]:
    if isinstance(pred, Forall):
        var_t = qtypes[pred.var]
        loop = WhileStmt(
            Binary("&&", _ok_read(), _compile_predicate_expr(pred.cond)),
            [
                IfStmt(
                    Unary("!", _compile_predicate_expr(pred.body)),
                    [_record_call(class_name, index)],
                    None,
                ),
                Assign(VarRead(pred.var), _compile_predicate_expr(pred.step)),
            ],
        )
        return [
            IfStmt(
                _ok_read(),
                [
                    LocalDecl(var_t, pred.var, _compile_predicate_expr(pred.init)),
                    loop,
                ],
                None,
            )
        ]
    return [
        IfStmt(
            Binary("&&", _ok_read(), Unary("!", _compile_predicate_expr(pred))),
            [_record_call(class_name, index)],
            None,
        )
    ]


def gen_visitor(
    unit: SourceUnit,
    spec: InvariantSpec,
    plan: ExposurePlan,
    naming: WeaveNaming,
) -> ClassDecl:
    table = ClassTable(unit)
    specified = _specified_in_unit_order(unit, spec)

    visit_methods: list[MethodDecl] = []
    for c in specified:
        body: list[Stmt] = []
        sup_name = _specified_super_name(table, spec, c)
        if sup_name is not None:
            body.append(ExprStmt(_this_call("visit_" + sup_name, [VarRead("obj")])))
        fv = class_free_vars_ordered(c.name, spec)
        preds = spec.predicates(c.name)
        if preds:
            inner: list[Stmt] = []
            for var in fv:
                hit = table.find_field(c.self_type(), var)
                assert hit is not None
                owner = _getter_owner(table, spec, plan, c, var)
                inner.append(
                    LocalDecl(
                        hit.type,
                        var,
                        MethodCall(VarRead("obj"), naming.getter(owner, var), []),
                    )
                )
            for i, p in enumerate(preds):
                qtypes = type_predicate(table, c, p).quantifier_types
                inner.extend(_predicate_stmts(c.name, i, p, qtypes))
            body.append(IfStmt(_ok_read(), inner, None))
        visit_methods.append(
            MethodDecl(
                name="visit_" + c.name,
                visibility="public",
                type_params=list(c.type_params),
                params=[
                    Param(
                        "obj",
                        NamedType(
                            naming.interface_names[c.name],
                            tuple(TypeVar(p) for p in c.type_params),
                        ),
                    )
                ],
                return_type=None,
                body=body,
            )
        )

    fields = [
        FieldDecl("_ok", _BOOL_T, "private"),
        FieldDecl("_fail_class", _STRING_T, "private"),
        FieldDecl("_fail_index", _INT_T, "private"),
    ]
    reset = MethodDecl(
        name="reset",
        visibility="public",
        return_type=None,
        body=[
            Assign(_this_field("_ok"), BoolLit(True)),
            Assign(_this_field("_fail_class"), StringLit("")),
            Assign(_this_field("_fail_index"), Unary("-", IntLit(1))),
        ],
    )
    valid = MethodDecl(
        name="valid",
        visibility="public",
        return_type=_BOOL_T,
        body=[ReturnStmt(_this_field("_ok"))],
    )
    failed_class = MethodDecl(
        name="failed_class",
        visibility="public",
        return_type=_STRING_T,
        body=[ReturnStmt(_this_field("_fail_class"))],
    )
    failed_index = MethodDecl(
        name="failed_index",
        visibility="public",
        return_type=_INT_T,
        body=[ReturnStmt(_this_field("_fail_index"))],
    )
    record = MethodDecl(
        name="_record",
        visibility="private",
        params=[Param("c", _STRING_T), Param("i", _INT_T)],
        return_type=None,
        body=[
            Assign(_this_field("_ok"), BoolLit(False)),
            Assign(_this_field("_fail_class"), VarRead("c")),
            Assign(_this_field("_fail_index"), VarRead("i")),
        ],
    )
    methods = [reset, valid, failed_class, failed_index]
    if visit_methods:
        methods.append(record)
    methods.extend(visit_methods)
    constructor = ConstructorDecl(
        visibility="public",
        params=[],
        body=[ExprStmt(_this_call("reset", []))],
    )
    return ClassDecl(
        name=naming.visitor_name,
        type_params=[],
        super_class=None,
        interfaces=[],
        is_abstract=False,
        fields=fields,
        constructor=constructor,
        methods=methods,
    )


def _getter_owner(
    table: ClassTable,
    spec: InvariantSpec,
    plan: ExposurePlan,
    c: ClassDecl,
    var: str,
) -> str:
    cur: ClassDecl | None = c
    while cur is not None:
        entry = plan.per_class.get(cur.name)
        if entry is not None and var in entry.signature_names():
            return cur.name
        sup = _specified_super_name(table, spec, cur)
        cur = table.get_class(sup) if sup is not None else None
    raise LookupError("no getter owner for %s.%s" % (c.name, var))


# ---------------------------------------------------------------------------
# Whole-program weaving and the space report
# ---------------------------------------------------------------------------


def weave_program(unit: SourceUnit, spec: InvariantSpec) -> WovenArtifacts:
    """Weave a typechecked unit with a validated specification.  The merged
    unit typechecks; original declarations are untouched (new nodes only)."""
    diags = errors_only(typecheck_program(unit))
    if diags:
        raise WeaveError(diags)
    sdiags = errors_only(validate_spec(spec, unit))
    if sdiags:
        raise WeaveError(sdiags)
    plan = compute_plan(unit, spec)
    vdiags = errors_only(verify_exposure(plan, unit, spec))
    if vdiags:
        raise WeaveError(vdiags)

    table = ClassTable(unit)
    naming = choose_names(unit, spec, plan)
    interfaces: list[InterfaceDecl] = []
    exposed: list[ClassDecl] = []
    stats: dict[str, _ClassStats] = {}
    for c in _specified_in_unit_order(unit, spec):
        iface = gen_exposure_interface(c, plan, naming, table, spec)
        interfaces.append(iface)
        st = _ClassStats()
        exposed.append(gen_exposed_class(c, iface, spec, naming, table, plan, st))
        stats[c.name] = st
    visitor = gen_visitor(unit, spec, plan, naming)

    artifacts = WovenArtifacts(
        interfaces=interfaces,
        exposed_classes=exposed,
        visitor=visitor,
        report=GenerationReport(),
        naming=naming,
        source_unit=unit,
        spec=spec,
    )
    artifacts.report = _build_report(artifacts, stats)

    merged_diags = errors_only(typecheck_program(artifacts.merged_unit()))
    if merged_diags:
        raise WeaveError(
            [Diagnostic("weave-internal", "woven unit does not typecheck")] + merged_diags
        )
    return artifacts


def specified_chain_depth(table: ClassTable, spec: InvariantSpec, name: str) -> int:
    """Consecutive specified strict ancestors of `name`."""
    depth = 0
    cur = table.get_class(name)
    while cur is not None:
        sup = _specified_super_name(table, spec, cur)
        if sup is None:
            break
        depth += 1
        cur = table.get_class(sup)
    return depth


def _build_report(artifacts: WovenArtifacts, stats: dict[str, _ClassStats]) -> GenerationReport:
    unit, spec = artifacts.source_unit, artifacts.spec
    table = ClassTable(unit)
    specified = _specified_in_unit_order(unit, spec)
    report = GenerationReport()
    iface_by_class = {
        c.name: i for c, i in zip(specified, artifacts.interfaces)
    }
    for c in specified:
        st = stats[c.name]
        report.per_class[c.name] = {
            "getters": st.getters,
            "wrappers": st.wrappers,
            "interface_signatures": len(iface_by_class[c.name].methods),
            "inherited_members": st.inherited_members,
        }
    report.depth = max(
        (specified_chain_depth(table, spec, c.name) for c in specified), default=0
    )
    report.max_new_members = max(
        (len(c.fields) + len(c.methods) for c in specified), default=0
    )
    report.formula_bound = report.depth * (report.depth + 1) // 2 * report.max_new_members
    return report


def space_report(artifacts: WovenArtifacts) -> GenerationReport:
    return artifacts.report


# ---------------------------------------------------------------------------
# Driver constructor swap (the user-side "drop-in" edit, automated for tests)
# ---------------------------------------------------------------------------


def swap_driver_constructors(unit: SourceUnit, artifacts: WovenArtifacts) -> SourceUnit:
    """A copy of `unit` whose driver constructs Exposed variants of specified
    concrete classes; everything else is shared."""
    import copy

    if unit.driver is None:
        return unit
    table = ClassTable(unit)
    swapped = SourceUnit(
        classes=unit.classes, interfaces=unit.interfaces, driver=copy.deepcopy(unit.driver)
    )

    def walk_expr(e: Expr) -> None:
        if isinstance(e, NewObject):
            decl = table.get_class(e.type.name)
            if (
                decl is not None
                and not decl.is_abstract
                and e.type.name in artifacts.naming.exposed_names
            ):
                e.type = NamedType(artifacts.naming.exposed_names[e.type.name], e.type.args)
            for a in e.args:
                walk_expr(a)
        elif isinstance(e, (Binary,)):
            walk_expr(e.left)
            walk_expr(e.right)
        elif isinstance(e, Unary):
            walk_expr(e.operand)
        elif isinstance(e, FieldAccess):
            walk_expr(e.obj)
        elif isinstance(e, MethodCall):
            if e.receiver is not None:
                walk_expr(e.receiver)
            for a in e.args:
                walk_expr(a)
        elif isinstance(e, ReflectGet):
            walk_expr(e.obj)

    def walk_stmt(s: Stmt) -> None:
        if isinstance(s, LocalDecl) and s.init is not None:
            walk_expr(s.init)
        elif isinstance(s, Assign):
            walk_expr(s.target)
            walk_expr(s.value)
        elif isinstance(s, IfStmt):
            walk_expr(s.cond)
            for x in s.then_body:
                walk_stmt(x)
            for x in s.else_body or []:
                walk_stmt(x)
        elif isinstance(s, WhileStmt):
            walk_expr(s.cond)
            for x in s.body:
                walk_stmt(x)
        elif isinstance(s, ReturnStmt) and s.value is not None:
            walk_expr(s.value)
        elif isinstance(s, ExprStmt):
            walk_expr(s.expr)
        elif isinstance(s, PrintStmt):
            walk_expr(s.value)
        elif isinstance(s, SuperCall):
            for a in s.args:
                walk_expr(a)

    for s in swapped.driver.body:
        walk_stmt(s)
    return swapped


def render_artifacts(artifacts: WovenArtifacts) -> dict[str, str]:
    """Map of output filename -> canonical source text, one per declaration,
    plus the space report."""
    out: dict[str, str] = {}
    for i in artifacts.interfaces:
        out[i.name + ".moo"] = render_source(SourceUnit(interfaces=[i]))
    for c in artifacts.exposed_classes:
        out[c.name + ".moo"] = render_source(SourceUnit(classes=[c]))
    out[artifacts.visitor.name + ".moo"] = render_source(
        SourceUnit(classes=[artifacts.visitor])
    )
    out["report.json"] = artifacts.report.to_json()
    return out
