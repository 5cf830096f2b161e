/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const classify_point: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const interface_trace: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
export const profile: (a: number, b: number, c: number) => [number, number, number, number];
export const region_labels: () => [number, number];
export const region_map: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_drop_slice: (a: number, b: number) => void;
export const __wbindgen_start: () => void;
