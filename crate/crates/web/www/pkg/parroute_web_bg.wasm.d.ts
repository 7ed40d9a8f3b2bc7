/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const hus_curves: (a: bigint, b: number) => [number, number];
export const partition: (a: number, b: number, c: bigint, d: number) => [number, number];
export const route_design: (a: number, b: number, c: number, d: bigint, e: number) => [number, number];
export const __externref_table_alloc: () => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
