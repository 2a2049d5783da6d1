using System;
using System.Collections.Generic;
using System.Linq;
using Shop.Business.Util;
using Shop.Data.Repositories;

namespace Shop.Business.Services
{
    public class CatalogService
    {
        private ProductRepository products = new ProductRepository();

        public decimal PriceOf(int productId)
        {
            List<decimal> history = products.PriceHistory(productId);
            decimal lowest = history.Min(p => p);
            return MathUtil.Round(Math.Max(lowest, products.GetPrice(productId)));
        }
    }
}
