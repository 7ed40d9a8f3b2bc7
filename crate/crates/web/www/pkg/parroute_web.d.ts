/* tslint:disable */
/* eslint-disable */

/**
 * Routes a congested design (length-1 wires only, few tracks) twice, with and without the
 * hybrid schedule, and returns both per-iteration overuse curves.
 */
export function hus_curves(seed: bigint, nets: number): string;

/**
 * Builds the partitioning tree for a generated design. `binary` picks the
 * two-way variant for comparison.
 */
export function partition(width: number, nets: number, seed: bigint, binary: boolean): string;

/**
 * Generates and routes a design. Paths come back as tile polylines:
 * one point per node, at the wire's exit tile.
 */
export function route_design(width: number, nets: number, tracks: number, seed: bigint, hus: boolean): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly hus_curves: (a: bigint, b: number) => [number, number];
    readonly partition: (a: number, b: number, c: bigint, d: number) => [number, number];
    readonly route_design: (a: number, b: number, c: number, d: bigint, e: number) => [number, number];
    readonly __externref_table_alloc: () => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
