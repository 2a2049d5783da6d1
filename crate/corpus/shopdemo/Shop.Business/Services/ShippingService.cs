using System;
using Shop.Data.Repositories;
using Shop.Services.Shipping;

namespace Shop.Business.Services
{
    public class ShippingService
    {
        private ProductRepository products = new ProductRepository();
        private ShippingServiceClient client = new ShippingServiceClient();

        public decimal Estimate(int productId)
        {
            int weight = products.WeightOf(productId);
            return client.GetRate(weight, "EU");
        }
    }
}
